"""Exact outcome probabilities and expectation values.

Every probability is a weighted sum of vacuum expectations of Heisenberg-evolved
projector strings sandwiched between the register's creation operators.  Nested
measurements (adaptive rounds, chain-rule prefixes) use one projector string per
stage, each evolved with the cumulative transfer at its measurement time.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from errors import (
    BranchMismatch,
    DegenerateConditional,
    ImaginaryResidual,
    NotNumberPreserving,
    ProbabilityOutOfRange,
    SchemaError,
)
from fermions.operators import LinearFermionicOperator, annihilator, creator, projector_pair
from fermions.transfer import ModeTransfer, compose_transfer
from fermions.wick import determinant_amplitude, require_number_preserving, vacuum_expectation
from model.circuit import AdaptiveProgram, Circuit
from model.states import BasisInput, InputSpec, OutcomeAssignment, ProductInput
from simulation.registers import Register, build_register, lowered_for


logger = logging.getLogger(__name__)

IMAG_TOL = 1e-9
RANGE_TOL = 1e-9
MAX_TABLE_QUBITS = 20
DEGENERATE_TOL = 1e-12


# -----------------------------
# Projector strings and stages
# -----------------------------


@dataclass(frozen=True)
class ProjectorString:
    """Projectors onto bits of distinct modes: (a†, a) for 1 and (a, a†) for 0."""

    entries: Tuple[Tuple[int, int], ...]

    def operators(self, n_modes: int) -> List[LinearFermionicOperator]:
        ops: List[LinearFermionicOperator] = []
        for mode, bit in self.entries:
            ops.extend(projector_pair(mode, bit, n_modes))
        return ops

    def evolved(self, transfer: ModeTransfer) -> List[LinearFermionicOperator]:
        ops: List[LinearFermionicOperator] = []
        for mode, bit in self.entries:
            pair = (transfer.evolved_creator(mode), transfer.evolved_annihilator(mode))
            ops.extend(pair if bit else pair[::-1])
        return ops

    def __add__(self, other: "ProjectorString") -> "ProjectorString":
        return ProjectorString(self.entries + other.entries)


@dataclass(frozen=True)
class Stage:
    """Projectors applied when the cumulative transfer is `transfer`."""

    transfer: ModeTransfer
    projectors: ProjectorString


def merged_stages(stages: Sequence[Stage]) -> List[Stage]:
    """Join neighbouring stages measured under the same transfer object."""
    out: List[Stage] = []
    for stage in stages:
        if out and out[-1].transfer is stage.transfer:
            out[-1] = Stage(stage.transfer, out[-1].projectors + stage.projectors)
        else:
            out.append(stage)
    return out


def nested_operators(stages: Sequence[Stage]) -> List[LinearFermionicOperator]:
    """E_1 ... E_{m-1} E_m E_{m-1} ... E_1 for stage projector strings E_i."""
    evolved = [stage.projectors.evolved(stage.transfer) for stage in merged_stages(stages)]
    if not evolved:
        return []
    ops: List[LinearFermionicOperator] = []
    for e in evolved:
        ops.extend(e)
    for e in reversed(evolved[:-1]):
        ops.extend(e)
    return ops


@dataclass(frozen=True)
class ParityBranchQuery:
    """Per-branch operator lists; each branch wraps the shared inner product with its occupied modes."""

    branches: Tuple[Tuple[float, Tuple[LinearFermionicOperator, ...]], ...]

    @classmethod
    def build(cls, register: Register, stages: Sequence[Stage]) -> "ParityBranchQuery":
        inner = nested_operators(stages)
        n = register.n_modes
        branches = []
        for weight, occupied in register.branches:
            left = [annihilator(m, n) for m in reversed(occupied)]
            right = [creator(m, n) for m in occupied]
            branches.append((weight, tuple(left + inner + right)))
        return cls(tuple(branches))

    def evaluate(self, context: str = "") -> float:
        value = sum(weight * vacuum_expectation(ops) for weight, ops in self.branches)
        return checked_probability(complex(value), context)


def checked_probability(value: complex, context: str = "") -> float:
    if abs(value.imag) > IMAG_TOL:
        raise ImaginaryResidual(value, context)
    p = float(value.real)
    if p < -RANGE_TOL or p > 1.0 + RANGE_TOL:
        raise ProbabilityOutOfRange(p, context)
    return min(max(p, 0.0), 1.0)


def stage_probability(register: Register, stages: Sequence[Stage], context: str = "") -> float:
    if not stages:
        return 1.0
    return ParityBranchQuery.build(register, stages).evaluate(context)


# -----------------------------
# Compiled circuits
# -----------------------------


@dataclass(frozen=True)
class CompiledCircuit:
    """Register and combined transfer of a circuit on a given input, wrap gates lowered."""

    circuit: Circuit
    input: InputSpec
    register: Register
    lowered: Circuit
    circuit_transfer: ModeTransfer
    transfer: ModeTransfer

    @property
    def n(self) -> int:
        return self.circuit.n


def compile_circuit(circuit: Circuit, spec: InputSpec, catalyst: bool = False) -> CompiledCircuit:
    if spec.n != circuit.n:
        raise SchemaError(f"input has {spec.n} qubits, circuit has {circuit.n}", field="input")
    lowered = lowered_for(circuit, spec)
    register = build_register(spec, catalyst)
    circuit_transfer = compose_transfer(lowered)
    transfer = register.start.then(circuit_transfer.extended(register.n_modes))
    logger.info(
        f"compiled circuit: n={circuit.n}, gates={lowered.gate_count}, modes={register.n_modes}, "
        f"branches={len(register.branches)}"
    )
    return CompiledCircuit(circuit, spec, register, lowered, circuit_transfer, transfer)


CircuitLike = Union[Circuit, CompiledCircuit]


def _compiled(target: CircuitLike, spec: InputSpec) -> CompiledCircuit:
    if isinstance(target, CompiledCircuit):
        if target.input != spec:
            raise SchemaError("compiled circuit was built for a different input", field="input")
        return target
    return compile_circuit(target, spec)


def _basis(x: Union[str, BasisInput]) -> BasisInput:
    return x if isinstance(x, BasisInput) else BasisInput(x)


def _computational_entries(assignment: OutcomeAssignment, n: int) -> ProjectorString:
    assignment.check_range(n)
    if not assignment.all_computational:
        raise SchemaError("exact probabilities are available for computational-basis outcomes only", field="measure")
    return ProjectorString(tuple((e.qubit - 1, e.bit) for e in assignment.entries))


def probability(compiled: CompiledCircuit, assignment: OutcomeAssignment) -> float:
    """Pr(assignment) for whichever input the circuit was compiled with."""
    projectors = _computational_entries(assignment, compiled.n)
    return stage_probability(
        compiled.register, [Stage(compiled.transfer, projectors)], f"outcome {assignment.bitstring}"
    )


# -----------------------------
# Strong simulation entry points
# -----------------------------


def prob_partial_basis(circuit: CircuitLike, x: Union[str, BasisInput], assignment: OutcomeAssignment) -> float:
    return probability(_compiled(circuit, _basis(x)), assignment)


def prob_partial_product(circuit: CircuitLike, spec: ProductInput, assignment: OutcomeAssignment) -> float:
    return probability(_compiled(circuit, spec), assignment)


def prob_full_basis(circuit: CircuitLike, x: Union[str, BasisInput], y: str) -> float:
    """|<y|M|x>|^2; determinant path for number-preserving circuits, Pfaffian path otherwise."""
    compiled = _compiled(circuit, _basis(x))
    if len(y) != compiled.n:
        raise SchemaError(f"outcome has {len(y)} bits for {compiled.n} qubits", field="outcome")
    t = compiled.circuit_transfer
    if t.number_preserving:
        amplitude = determinant_amplitude(t.R, compiled.input.bits, y)
        return checked_probability(complex(abs(amplitude) ** 2), f"outcome {y}")
    return probability(compiled, OutcomeAssignment.from_bits(range(1, compiled.n + 1), y))


def transition_amplitude(circuit: CircuitLike, x: Union[str, BasisInput], y: str) -> complex:
    """<y|M|x> for number-preserving circuits."""
    compiled = _compiled(circuit, _basis(x))
    t = compiled.circuit_transfer
    require_number_preserving(t.R_prime)
    if t.vacuum_phase is None:
        raise NotNumberPreserving("vacuum phase is undetermined for circuits containing pair-creating gates")
    return t.vacuum_phase * determinant_amplitude(t.R, compiled.input.bits, y)


def majorana_two_point(spec: InputSpec) -> np.ndarray:
    """G[a, b] = <psi| c_a c_b |psi> for a product state psi."""
    states = spec.as_product().qubits
    n = len(states)
    x, y, z = (np.array(v) for v in zip(*(s.pauli_expectations() for s in states)))

    left = np.empty(2 * n, dtype=complex)
    left[0::2] = -1j * y  # X Z = -i Y
    left[1::2] = 1j * x  # Y Z = i X
    right = np.empty(2 * n, dtype=complex)
    right[0::2] = x
    right[1::2] = y

    between = np.zeros((n, n))
    for p in range(n - 1):
        between[p, p + 1 :] = np.concatenate(([1.0], np.cumprod(z[p + 1 : n - 1])))
    upper = np.outer(left, right) * np.kron(between, np.ones((2, 2)))
    upper[0::2, 1::2] += np.diag(1j * z)  # same mode: X Y = i Z
    return upper - upper.T + np.eye(2 * n)


def expectation_z(circuit: CircuitLike, spec: InputSpec, k: int) -> float:
    """<Z_k> after the circuit, from single-qubit Pauli expectations of the input."""
    if isinstance(circuit, CompiledCircuit):
        t = circuit.circuit_transfer
        n = circuit.n
    else:
        n = circuit.n
        if spec.n != n:
            raise SchemaError(f"input has {spec.n} qubits, circuit has {n}", field="input")
        t = compose_transfer(lowered_for(circuit, spec))
    if not 1 <= k <= n:
        raise SchemaError(f"qubit {k} outside 1..{n}", field="qubit")
    q = t.majorana
    mode = k - 1
    gamma = majorana_two_point(spec)
    value = -1j * (q[2 * mode] @ gamma @ q[2 * mode + 1])
    if abs(value.imag) > IMAG_TOL:
        raise ImaginaryResidual(complex(value), f"<Z_{k}>")
    return float(min(max(value.real, -1.0), 1.0))


def outcome_table(
    compiled: CompiledCircuit,
    qubits: Sequence[int],
    threads: Optional[int] = None,
) -> pd.DataFrame:
    """Exact distribution over all 2^k outcomes of `qubits`, rows in lexicographic order."""
    k = len(qubits)
    if not 1 <= k <= MAX_TABLE_QUBITS:
        raise SchemaError(f"tables cover 1..{MAX_TABLE_QUBITS} qubits, got {k}", field="all-over")
    outcomes = [format(v, f"0{k}b") for v in range(2**k)]

    def _one(bits: str) -> float:
        return probability(compiled, OutcomeAssignment.from_bits(qubits, bits))

    if threads and threads > 1 and len(outcomes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            probs = list(pool.map(_one, outcomes))
    else:
        probs = [_one(bits) for bits in outcomes]
    return pd.DataFrame({"outcome": outcomes, "probability": probs})


# -----------------------------
# Adaptive programs
# -----------------------------


def round_stage_transfer(
    program: AdaptiveProgram, round_index: int, spec: InputSpec, previous: ModeTransfer
) -> ModeTransfer:
    """Cumulative transfer after the segment of round `round_index`."""
    segment = lowered_for(program.rounds[round_index].segment, spec)
    return compose_transfer(segment, start=previous)


def ordered_round_bits(program: AdaptiveProgram, round_index: int, assignment: OutcomeAssignment) -> str:
    """Assignment bits in the round's measure order; BranchMismatch when qubits differ."""
    measured = program.rounds[round_index].measure.qubits
    given = {e.qubit: e.bit for e in assignment.entries}
    if sorted(given) != sorted(measured):
        raise BranchMismatch(
            f"round {round_index} measures qubits {list(measured)}, trace gives {sorted(given)}",
            {"round": round_index, "expected": list(measured), "given": sorted(given)},
        )
    return "".join(str(given[q]) for q in measured)


def adaptive_stages(
    program: AdaptiveProgram,
    spec: InputSpec,
    trace: Sequence[OutcomeAssignment],
    register: Optional[Register] = None,
) -> Tuple[Register, List[Stage], Optional[int], ModeTransfer]:
    """Stages of a trace prefix, the next round index (None when finished) and the last transfer."""
    register = register or build_register(spec)
    transfer = register.start
    stages: List[Stage] = []
    index: Optional[int] = 0
    for step, assignment in enumerate(trace):
        if index is None:
            raise BranchMismatch(
                f"trace continues after the program stopped (entry {step})", {"entry": step}
            )
        bits = ordered_round_bits(program, index, assignment)
        transfer = round_stage_transfer(program, index, spec, transfer)
        measured = program.rounds[index].measure.qubits
        stages.append(Stage(transfer, ProjectorString(tuple((q - 1, int(b)) for q, b in zip(measured, bits)))))
        index = program.rounds[index].next_round(bits)
    return register, stages, index, transfer


def adaptive_joint_prob(
    program: AdaptiveProgram,
    spec: InputSpec,
    trace: Sequence[OutcomeAssignment],
) -> float:
    """Probability of observing `trace` round by round; a shorter trace gives its prefix marginal."""
    register, stages, _, _ = adaptive_stages(program, spec, trace)
    label = " | ".join(a.bitstring for a in trace)
    return stage_probability(register, stages, f"trace {label}")


def final_round_distribution(
    program: AdaptiveProgram,
    spec: InputSpec,
    trace: Sequence[OutcomeAssignment],
) -> Dict[str, float]:
    """Conditional distribution of the round reached after `trace`, keyed by its bits."""
    register, stages, index, transfer = adaptive_stages(program, spec, trace)
    if index is None:
        raise BranchMismatch("trace already ends the program; no round left to measure")
    round_ = program.rounds[index]
    if round_.measure.size > MAX_TABLE_QUBITS:
        raise SchemaError(f"final round measures more than {MAX_TABLE_QUBITS} qubits", field="measure")
    prefix = stage_probability(register, stages, "trace prefix")
    if prefix < DEGENERATE_TOL:
        raise DegenerateConditional(" | ".join(a.bitstring for a in trace), prefix)
    transfer = round_stage_transfer(program, index, spec, transfer)
    out: Dict[str, float] = {}
    k = round_.measure.size
    for v in range(2**k):
        bits = format(v, f"0{k}b")
        projectors = ProjectorString(tuple((q - 1, int(b)) for q, b in zip(round_.measure.qubits, bits)))
        joint = stage_probability(register, stages + [Stage(transfer, projectors)], f"final {bits}")
        out[bits] = joint / prefix
    return out
