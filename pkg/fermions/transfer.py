"""Linear action of matchgate circuits on Majorana operators.

A ModeTransfer stores the real 2n x 2n matrix Q with U† c_a U = sum_b Q[a, b] c_b
(0-based Majoranas, see fermions.operators). Appending a later gate left-multiplies
Q, so composition in circuit order is a sequential fold.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from errors import DimensionMismatch, IndefiniteParity, NotLinearizable
from fermions.operators import LinearFermionicOperator
from model.circuit import Circuit
from model.gates import MATCHGATE_TOL, PAULI, Matchgate


logger = logging.getLogger(__name__)

LINEARIZE_TOL = 1e-10
NUMBER_PRESERVING_TOL = 1e-12

_PAULI_LABELS = tuple(a + b for a in "IXYZ" for b in "IXYZ")
_PAULI_BASIS = np.stack([np.kron(PAULI[label[0]], PAULI[label[1]]) for label in _PAULI_LABELS])
# c_{2i}, c_{2i+1}, c_{2i+2}, c_{2i+3} restricted to the pair (i, i+1); the
# string over qubits below i commutes with the gate and drops out.
_LOCAL_MAJORANAS = ("XI", "YI", "ZX", "ZY")
_LOCAL_INDEX = [_PAULI_LABELS.index(label) for label in _LOCAL_MAJORANAS]
_OUTSIDE_INDEX = [k for k in range(16) if k not in _LOCAL_INDEX]


def local_majorana_action(gate: Matchgate) -> np.ndarray:
    """4x4 real w with g† c_a g = sum_b w[a, b] c_b on the gate's two modes."""
    u = gate.matrix
    w = np.empty((4, 4), dtype=complex)
    for a, label in enumerate(_LOCAL_MAJORANAS):
        conjugated = u.conj().T @ _PAULI_BASIS[_PAULI_LABELS.index(label)] @ u
        coefficients = np.einsum("kij,ji->k", _PAULI_BASIS, conjugated) / 4.0
        leak = float(np.linalg.norm(coefficients[_OUTSIDE_INDEX]))
        if leak > LINEARIZE_TOL:
            raise NotLinearizable(
                f"conjugated {label} has weight {leak:.3e} outside the Majorana span",
                {"majorana": label, "residual": leak},
            )
        w[a] = coefficients[_LOCAL_INDEX]
    imaginary = float(np.max(np.abs(w.imag)))
    if imaginary > LINEARIZE_TOL:
        raise NotLinearizable(f"Majorana action has imaginary part {imaginary:.3e}", {"residual": imaginary})
    return w.real


@dataclass(frozen=True, eq=False)
class ModeTransfer:
    """Heisenberg action of a circuit on n fermionic modes.

    vacuum_phase is <0|U|0> while every gate keeps the vacuum (diagonal A blocks),
    None once a pair-creating gate has been applied.
    """

    majorana: np.ndarray
    vacuum_phase: Optional[complex] = 1.0

    def __post_init__(self) -> None:
        q = np.asarray(self.majorana, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1] or q.shape[0] % 2:
            raise DimensionMismatch(f"Majorana transfer must be 2n x 2n, got shape {q.shape}")
        q.setflags(write=False)
        object.__setattr__(self, "majorana", q)

    @classmethod
    def identity(cls, n_modes: int) -> "ModeTransfer":
        return cls(np.eye(2 * n_modes))

    @property
    def n_modes(self) -> int:
        return self.majorana.shape[0] // 2

    def then(self, later: "ModeTransfer") -> "ModeTransfer":
        """Transfer of this circuit followed by `later`."""
        if later.n_modes != self.n_modes:
            raise DimensionMismatch(f"cannot compose transfers on {self.n_modes} and {later.n_modes} modes")
        phase = None
        if self.vacuum_phase is not None and later.vacuum_phase is not None:
            phase = self.vacuum_phase * later.vacuum_phase
        return ModeTransfer(later.majorana @ self.majorana, phase)

    def extended(self, n_modes: int) -> "ModeTransfer":
        """Embed into a larger register; the extra modes come last and stay untouched."""
        if n_modes < self.n_modes:
            raise DimensionMismatch(f"cannot shrink a {self.n_modes}-mode transfer to {n_modes} modes")
        q = np.eye(2 * n_modes)
        q[: 2 * self.n_modes, : 2 * self.n_modes] = self.majorana
        return ModeTransfer(q, self.vacuum_phase)

    # -----------------------------
    # Heisenberg evolution
    # -----------------------------

    def evolve(self, op: LinearFermionicOperator) -> LinearFermionicOperator:
        """U† f U."""
        if op.n != self.n_modes:
            raise DimensionMismatch(f"operator on {op.n} modes, transfer on {self.n_modes}")
        return LinearFermionicOperator.from_majorana(self.majorana.T @ op.majorana_coefficients())

    def evolved_annihilator(self, mode: int) -> LinearFermionicOperator:
        q = self.majorana
        return LinearFermionicOperator.from_majorana((q[2 * mode] + 1j * q[2 * mode + 1]) / 2.0)

    def evolved_creator(self, mode: int) -> LinearFermionicOperator:
        q = self.majorana
        return LinearFermionicOperator.from_majorana((q[2 * mode] - 1j * q[2 * mode + 1]) / 2.0)

    # -----------------------------
    # (a, a†) views
    # -----------------------------

    def _schrodinger_creators(self) -> np.ndarray:
        # column i: Majorana coefficients of U a†_i U†
        q = self.majorana
        return (q[:, 0::2] - 1j * q[:, 1::2]) / 2.0

    @property
    def R(self) -> np.ndarray:
        """U a†_i U† = sum_j R[i, j] a†_j + R'[i, j] a_j."""
        g = self._schrodinger_creators()
        return (g[0::2, :] + 1j * g[1::2, :]).T

    @property
    def R_prime(self) -> np.ndarray:
        g = self._schrodinger_creators()
        return (g[0::2, :] - 1j * g[1::2, :]).T

    def ladder_matrix(self) -> np.ndarray:
        """T acting on the column (a_1..a_n, a†_1..a†_n) in the Schrödinger view."""
        r, rp = self.R, self.R_prime
        return np.block([[r.conj(), rp.conj()], [rp, r]])

    @property
    def number_preserving(self) -> bool:
        return float(np.max(np.abs(self.R_prime))) <= NUMBER_PRESERVING_TOL

    def car_residual(self) -> float:
        """||T Ω T^T - Ω||_max with Ω the anticommutator matrix of (a, a†)."""
        n = self.n_modes
        omega = np.block([[np.zeros((n, n)), np.eye(n)], [np.eye(n), np.zeros((n, n))]])
        t = self.ladder_matrix()
        return float(np.max(np.abs(t @ omega @ t.T - omega)))

    def orthogonality_residual(self) -> float:
        q = self.majorana
        return float(np.max(np.abs(q @ q.T - np.eye(q.shape[0]))))


def _gate_vacuum_phase(gate: Matchgate) -> Optional[complex]:
    if abs(gate.A[1, 0]) > MATCHGATE_TOL or abs(gate.A[0, 1]) > MATCHGATE_TOL:
        return None
    return complex(gate.A[0, 0])


def gate_mode_action(gate: Matchgate, position: int, n: int) -> ModeTransfer:
    """Transfer of a single gate on (position, position+1), 1-based."""
    if not 1 <= position <= n - 1:
        raise DimensionMismatch(f"position {position} outside 1..{n - 1}")
    q = np.eye(2 * n)
    start = 2 * (position - 1)
    q[start : start + 4, start : start + 4] = local_majorana_action(gate)
    return ModeTransfer(q, _gate_vacuum_phase(gate))


def compose_transfer(
    circuit: Circuit,
    n_modes: Optional[int] = None,
    start: Optional[ModeTransfer] = None,
) -> ModeTransfer:
    """Transfer of the whole circuit, optionally embedded in n_modes >= circuit.n and
    appended after `start`."""
    if circuit.has_wrap_gates:
        raise IndefiniteParity("wrap-around gates must be lowered for a definite input parity before composition")
    n_modes = n_modes or (start.n_modes if start is not None else circuit.n)
    if n_modes < circuit.n:
        raise DimensionMismatch(f"circuit on {circuit.n} qubits does not fit {n_modes} modes")
    if start is not None and start.n_modes != n_modes:
        raise DimensionMismatch(f"start transfer has {start.n_modes} modes, expected {n_modes}")

    q = np.array(start.majorana) if start is not None else np.eye(2 * n_modes)
    phase: Optional[complex] = start.vacuum_phase if start is not None else 1.0
    for app in circuit.gates:
        rows = slice(2 * (app.position - 1), 2 * (app.position - 1) + 4)
        q[rows] = local_majorana_action(app.gate) @ q[rows]
        if phase is not None:
            gate_phase = _gate_vacuum_phase(app.gate)
            phase = None if gate_phase is None else phase * gate_phase
    logger.debug(f"composed transfer: modes={n_modes}, gates={circuit.gate_count}, vacuum_phase={phase}")
    return ModeTransfer(q, phase)


# -----------------------------
# Mode permutations
# -----------------------------


@dataclass(frozen=True)
class ModePermutation:
    """Relabeling Π with Π a_j Π† = a_{targets[j]} (0-based)."""

    targets: Tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if sorted(self.targets) != list(range(len(self.targets))):
            raise DimensionMismatch(f"{list(self.targets)} is not a permutation of 0..{len(self.targets) - 1}")

    @classmethod
    def identity(cls, n: int) -> "ModePermutation":
        return cls(tuple(range(n)))

    @classmethod
    def from_order(cls, order: Sequence[int]) -> "ModePermutation":
        """Slot p receives the mode order[p]."""
        targets = [0] * len(order)
        for slot, mode in enumerate(order):
            targets[mode] = slot
        return cls(tuple(targets))

    @classmethod
    def transposition(cls, n: int, i: int, j: int) -> "ModePermutation":
        targets = list(range(n))
        targets[i], targets[j] = j, i
        return cls(tuple(targets))

    @property
    def n(self) -> int:
        return len(self.targets)

    def inverse(self) -> "ModePermutation":
        inv = [0] * self.n
        for j, t in enumerate(self.targets):
            inv[t] = j
        return ModePermutation(tuple(inv))

    def extended(self, n: int) -> "ModePermutation":
        return ModePermutation(self.targets + tuple(range(self.n, n)))


def permute_modes(transfer: ModeTransfer, perm: ModePermutation) -> ModeTransfer:
    """Transfer of the circuit followed by the relabeling perm."""
    if perm.n < transfer.n_modes:
        perm = perm.extended(transfer.n_modes)
    elif perm.n > transfer.n_modes:
        raise DimensionMismatch(f"permutation on {perm.n} modes, transfer on {transfer.n_modes}")
    rows = np.empty(2 * perm.n, dtype=int)
    for j, t in enumerate(perm.targets):
        rows[2 * t] = 2 * j
        rows[2 * t + 1] = 2 * j + 1
    return ModeTransfer(transfer.majorana[rows], transfer.vacuum_phase)


def permutation_transfer(perm: ModePermutation) -> ModeTransfer:
    return permute_modes(ModeTransfer.identity(perm.n), perm)

