from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from errors import BranchMismatch, SchemaError
from model.gates import Matchgate, z_rotation
from model.states import InputSpec, MeasurementSpec


DEFAULT_BRANCH = "default"


@dataclass(frozen=True)
class GateApplication:
    """A matchgate on (position, position+1), or on the wrap pair (n, 1) when wrap is set.

    For the wrap pair the first tensor factor of the gate is qubit n.
    """

    gate: Matchgate
    position: int
    wrap: bool = False


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: Tuple[GateApplication, ...] = ()
    pbc: bool = False

    def __post_init__(self) -> None:
        if self.n < 2:
            raise SchemaError(f"a circuit needs at least 2 qubits, got n={self.n}", field="n")
        object.__setattr__(self, "gates", tuple(self.gates))
        for idx, app in enumerate(self.gates):
            where = f"gates[{idx}].pos"
            if app.wrap:
                if not self.pbc:
                    raise SchemaError("wrap-around gate on a circuit without pbc", field=f"gates[{idx}].pbc")
                if app.position != self.n:
                    raise SchemaError(f"wrap-around gate must sit at pos {self.n}, got {app.position}", field=where)
            elif not 1 <= app.position <= self.n - 1:
                raise SchemaError(f"pos {app.position} outside 1..{self.n - 1}", field=where)

    @property
    def has_wrap_gates(self) -> bool:
        return any(app.wrap for app in self.gates)

    @property
    def gate_count(self) -> int:
        return len(self.gates)

    def then(self, other: "Circuit") -> "Circuit":
        if other.n != self.n:
            raise SchemaError(f"cannot join circuits on {self.n} and {other.n} qubits", field="n")
        return Circuit(self.n, self.gates + other.gates, self.pbc or other.pbc)


def z_rotation_application(qubit: int, theta: float, n: int) -> GateApplication:
    """exp(i theta Z_qubit) as a matchgate; the last qubit rides on the pair (n-1, n)."""
    if qubit < n:
        return GateApplication(z_rotation(theta), qubit)
    return GateApplication(z_rotation(theta, on_second=True), n - 1)


# -----------------------------
# Adaptive programs
# -----------------------------


@dataclass(frozen=True)
class Round:
    segment: Circuit
    measure: MeasurementSpec
    branches: Tuple[Tuple[str, Optional[int]], ...] = ()

    @property
    def is_terminal(self) -> bool:
        return not self.branches

    @property
    def branch_table(self) -> Dict[str, Optional[int]]:
        return dict(self.branches)

    def next_round(self, bits: str) -> Optional[int]:
        if self.is_terminal:
            return None
        table = self.branch_table
        if bits in table:
            return table[bits]
        if DEFAULT_BRANCH in table:
            return table[DEFAULT_BRANCH]
        raise BranchMismatch(f"no branch for outcome {bits!r}", {"bits": bits})


@dataclass(frozen=True)
class AdaptiveProgram:
    """Rounds of (segment, measurement, branch table); execution starts at round 0.

    Branch targets are 0-based round indices pointing strictly forward, or None to stop.
    """

    n: int
    rounds: Tuple[Round, ...]
    pbc: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "rounds", tuple(self.rounds))
        if not self.rounds:
            raise SchemaError("an adaptive program needs at least one round", field="rounds")
        for idx, rnd in enumerate(self.rounds):
            where = f"rounds[{idx}]"
            if rnd.segment.n != self.n:
                raise SchemaError(f"segment acts on {rnd.segment.n} qubits, program on {self.n}", field=f"{where}.gates")
            if rnd.measure.size == 0:
                raise SchemaError("every round measures at least one qubit", field=f"{where}.measure")
            if not rnd.measure.all_computational:
                raise SchemaError("adaptive rounds measure in the computational basis", field=f"{where}.measure")
            for q in rnd.measure.qubits:
                if not 1 <= q <= self.n:
                    raise SchemaError(f"qubit {q} outside 1..{self.n}", field=f"{where}.measure")
            self._check_branches(idx, rnd, where)

    def _check_branches(self, idx: int, rnd: Round, where: str) -> None:
        if rnd.is_terminal:
            return
        k = rnd.measure.size
        table = rnd.branch_table
        for key, target in table.items():
            if key != DEFAULT_BRANCH and (len(key) != k or any(ch not in "01" for ch in key)):
                raise SchemaError(f"branch key {key!r} is not a {k}-bit outcome", field=f"{where}.branches")
            if target is not None and not idx < target < len(self.rounds):
                raise SchemaError(
                    f"branch {key!r} targets round {target}; targets must point forward within 0..{len(self.rounds) - 1}",
                    field=f"{where}.branches.{key}",
                )
        if DEFAULT_BRANCH not in table:
            missing = [format(v, f"0{k}b") for v in range(2**k) if format(v, f"0{k}b") not in table]
            if missing:
                raise SchemaError(
                    f"branch table misses outcomes {missing[:4]}{'...' if len(missing) > 4 else ''}",
                    field=f"{where}.branches",
                    missing=missing,
                )

    @property
    def max_measured_bits(self) -> int:
        """Upper bound on bits along any execution path (rounds are visited at most once)."""
        return sum(r.measure.size for r in self.rounds)

    def register(self) -> Circuit:
        return Circuit(self.n, (), self.pbc)


@dataclass(frozen=True)
class CircuitFile:
    """Everything one circuit file carries."""

    circuit: Circuit
    input: InputSpec
    measure: Optional[MeasurementSpec] = None
    outcome_bits: Optional[str] = None
    program: Optional[AdaptiveProgram] = None

    @property
    def is_adaptive(self) -> bool:
        return self.program is not None

    def assignments(self):
        """The file's OutcomeAssignment list: one entry when every measure entry carries a bit."""
        if self.measure is None or self.outcome_bits is None:
            return []
        return [self.measure.assign(self.outcome_bits)]
