"""Dense state-vector ground truth, exponential in n and capped at MAX_QUBITS.

Qubit 1 is the most significant bit of a basis index.
"""

import logging
from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from errors import DimensionGuard, DimensionMismatch, ImpossibleOutcome, NumericalIntegrityError
from fermions.operators import LinearFermionicOperator
from model.circuit import AdaptiveProgram, Circuit
from model.gates import Matchgate
from model.states import COMPUTATIONAL, Basis, BasisInput, InputSpec, OutcomeAssignment, SingleQubitState


logger = logging.getLogger(__name__)

MAX_QUBITS = 14
NORM_TOL = 1e-10
IMPOSSIBLE_TOL = 1e-12


def qubit_limit(spec: InputSpec) -> int:
    """Product inputs keep one qubit of headroom for the preparation ancilla."""
    return MAX_QUBITS if isinstance(spec, BasisInput) else MAX_QUBITS - 1


def check_size(n: int, limit: int = MAX_QUBITS) -> None:
    if n > limit:
        raise DimensionGuard(n, limit)


@dataclass(frozen=True, eq=False)
class StateVector:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        check_size(self.n)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != 2**self.n:
            raise DimensionMismatch(f"{amps.shape[0]} amplitudes for {self.n} qubits")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape([2] * self.n)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def _checked(n: int, amplitudes: np.ndarray, what: str) -> StateVector:
    sv = StateVector(n, amplitudes)
    drift = abs(sv.norm - 1.0)
    if drift > NORM_TOL:
        raise NumericalIntegrityError(f"norm drifted by {drift:.3e} after {what}", {"drift": drift})
    return sv


def basis_state(bits: str) -> StateVector:
    n = len(bits)
    check_size(n)
    amps = np.zeros(2**n, dtype=complex)
    amps[int(bits, 2)] = 1.0
    return StateVector(n, amps)


def product_state(qubits: Sequence[SingleQubitState]) -> StateVector:
    check_size(len(qubits))
    amps = np.ones(1, dtype=complex)
    for q in qubits:
        amps = np.kron(amps, q.amplitudes)
    return StateVector(len(qubits), amps)


def input_state(spec: InputSpec) -> StateVector:
    if isinstance(spec, BasisInput):
        return basis_state(spec.bits)
    return product_state(spec.qubits)


# -----------------------------
# Gates
# -----------------------------


def apply_gate(sv: StateVector, gate: Union[Matchgate, np.ndarray], i: int, j: int) -> StateVector:
    """Two-qubit unitary on qubits (i, j), 1-based, i the first tensor factor."""
    m = gate.matrix if isinstance(gate, Matchgate) else np.asarray(gate, dtype=complex)
    if m.shape != (4, 4):
        raise DimensionMismatch(f"two-qubit gate must be 4x4, got {m.shape}")
    if i == j or not (1 <= i <= sv.n and 1 <= j <= sv.n):
        raise DimensionMismatch(f"invalid qubit pair ({i}, {j}) on {sv.n} qubits")
    out = np.tensordot(m.reshape(2, 2, 2, 2), sv.tensor(), axes=([2, 3], [i - 1, j - 1]))
    out = np.moveaxis(out, [0, 1], [i - 1, j - 1])
    return _checked(sv.n, out, "two-qubit gate")


def check_qubits(n: int, qubits: Sequence[int]) -> None:
    """Qubits must be distinct and lie in 1..n."""
    bad = [q for q in qubits if not 1 <= q <= n]
    if bad:
        raise DimensionMismatch(f"qubit {bad[0]} is outside 1..{n}", {"qubit": bad[0], "n": n})
    if len(set(qubits)) != len(qubits):
        raise DimensionMismatch(f"repeated qubit in {list(qubits)}", {"qubits": list(qubits)})


def apply_single(sv: StateVector, u: np.ndarray, qubit: int) -> StateVector:
    check_qubits(sv.n, [qubit])
    out = np.tensordot(np.asarray(u, dtype=complex), sv.tensor(), axes=([1], [qubit - 1]))
    return StateVector(sv.n, np.moveaxis(out, 0, qubit - 1))


def run_circuit(sv: StateVector, circuit: Circuit) -> StateVector:
    """Apply every gate, wrap gates on (n, 1) with qubit n as the first factor."""
    for app in circuit.gates:
        if app.wrap:
            sv = apply_gate(sv, app.gate, circuit.n, 1)
        else:
            sv = apply_gate(sv, app.gate, app.position, app.position + 1)
    return sv


def circuit_state(circuit: Circuit, spec: InputSpec) -> StateVector:
    check_size(circuit.n, qubit_limit(spec))
    return run_circuit(input_state(spec), circuit)


# -----------------------------
# Measurement
# -----------------------------


def _rotated_to_computational(sv: StateVector, qubits: Sequence[int], bases: Sequence[Basis]) -> StateVector:
    for q, basis in zip(qubits, bases):
        if basis.is_computational:
            continue
        zero, one = basis.vectors
        sv = apply_single(sv, np.array([zero.conj(), one.conj()]), q)
    return sv


def exact_distribution(
    sv: StateVector,
    qubits: Sequence[int],
    bases: Optional[Sequence[Basis]] = None,
) -> Dict[str, float]:
    """Born-rule table over the listed qubits, keys in listed order."""
    check_qubits(sv.n, qubits)
    k = len(qubits)
    check_size(k)
    bases = list(bases) if bases is not None else [COMPUTATIONAL] * k
    rotated = _rotated_to_computational(sv, qubits, bases)
    probs = np.abs(rotated.tensor()) ** 2
    others = tuple(a for a in range(sv.n) if a + 1 not in qubits)
    marginal = probs.sum(axis=others) if others else probs
    ascending = sorted(qubits)
    marginal = np.transpose(marginal, [ascending.index(q) for q in qubits]).reshape(-1)
    return {format(v, f"0{k}b"): float(p) for v, p in enumerate(marginal)}


def assignment_probability(sv: StateVector, assignment: OutcomeAssignment) -> float:
    table = exact_distribution(sv, assignment.qubits, [e.basis for e in assignment.entries])
    return table[assignment.bitstring]


def project_and_renormalize(
    sv: StateVector, qubit: int, bit: int, basis: Basis = COMPUTATIONAL
) -> Tuple[StateVector, float]:
    v = basis.vectors[bit]
    projected = apply_single(sv, np.outer(v, v.conj()), qubit)
    p = float(projected.norm**2)
    if p < IMPOSSIBLE_TOL:
        raise ImpossibleOutcome(qubit, bit, p)
    return StateVector(sv.n, projected.amplitudes / np.sqrt(p)), p


def expectation_z(sv: StateVector, k: int) -> float:
    table = exact_distribution(sv, [k])
    return table["0"] - table["1"]


# -----------------------------
# Fermionic operators
# -----------------------------


def jordan_wigner_operators(n: int) -> List[sparse.csr_matrix]:
    """a_j = Z^{⊗(j-1)} ⊗ |0><1| ⊗ I, as sparse matrices, j = 1..n."""
    check_size(n)
    z = sparse.csr_matrix(np.diag([1.0, -1.0]).astype(complex))
    lower = sparse.csr_matrix(np.array([[0, 1], [0, 0]], dtype=complex))
    ops = []
    for j in range(n):
        factors = [z] * j + [lower] + [sparse.identity(2, dtype=complex, format="csr")] * (n - j - 1)
        m = factors[0]
        for f in factors[1:]:
            m = sparse.kron(m, f, format="csr")
        ops.append(m.tocsr())
    return ops


def dense_operator(op: LinearFermionicOperator, ladder: Sequence[sparse.csr_matrix]) -> sparse.csr_matrix:
    total = sparse.csr_matrix(ladder[0].shape, dtype=complex)
    for p, a in enumerate(ladder):
        if op.alpha[p]:
            total = total + op.alpha[p] * a
        if op.beta[p]:
            total = total + op.beta[p] * a.conj().T
    return total


def dense_vacuum_expectation(ops: Sequence[LinearFermionicOperator]) -> complex:
    """<0| f_1 ... f_m |0> by explicit Fock-space products."""
    n = ops[0].n
    ladder = jordan_wigner_operators(n)
    vacuum = np.zeros(2**n, dtype=complex)
    vacuum[0] = 1.0
    state = vacuum.copy()
    for op in reversed(ops):
        state = dense_operator(op, ladder) @ state
    return complex(vacuum.conj() @ state)


# -----------------------------
# Adaptive programs
# -----------------------------


def trace_distribution(program: AdaptiveProgram, spec: InputSpec) -> Dict[Tuple[str, ...], float]:
    """Exact probability of every complete trace (bits per visited round)."""
    check_size(program.n, qubit_limit(spec))
    out: Dict[Tuple[str, ...], float] = {}

    def _walk(sv: StateVector, index: int, trace: Tuple[str, ...], weight: float) -> None:
        rnd = program.rounds[index]
        sv = run_circuit(sv, rnd.segment)
        for values in product((0, 1), repeat=rnd.measure.size):
            state, p = sv, 1.0
            try:
                for q, b in zip(rnd.measure.qubits, values):
                    state, step = project_and_renormalize(state, q, b)
                    p *= step
            except ImpossibleOutcome:
                continue
            bits = "".join(str(b) for b in values)
            nxt = rnd.next_round(bits)
            if nxt is None:
                out[trace + (bits,)] = weight * p
            else:
                _walk(state, nxt, trace + (bits,), weight * p)

    _walk(input_state(spec), 0, (), 1.0)
    logger.debug(f"dense trace distribution: {len(out)} traces")
    return out

