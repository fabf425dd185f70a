from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np
from scipy.linalg import expm
from scipy.stats import unitary_group

from errors import DeterminantMismatch, DimensionMismatch, MatchgateValidationError, NotUnitary


MATCHGATE_TOL = 1e-12

# Two-qubit basis order |00>, |01>, |10>, |11>; the first tensor factor is the
# lower-indexed qubit. A acts on the even pair (|00>, |11>), B on (|01>, |10>).
_EVEN = (0, 3)
_ODD = (1, 2)

PAULI: Dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)

# Nearest-neighbour generator set: the even two-qubit Paulis other than I and Z⊗Z.
GENERATOR_LABELS = ("XX", "XY", "YX", "YY", "ZI", "IZ")


def _frozen(m: np.ndarray) -> np.ndarray:
    m = np.array(m, dtype=complex)
    m.setflags(write=False)
    return m


@dataclass(frozen=True, eq=False)
class Matchgate:
    """Validated two-qubit gate G(A, B). Build through validate_matchgate."""

    A: np.ndarray
    B: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        m = np.zeros((4, 4), dtype=complex)
        m[np.ix_(_EVEN, _EVEN)] = self.A
        m[np.ix_(_ODD, _ODD)] = self.B
        return m

    @property
    def is_number_preserving(self) -> bool:
        return abs(self.A[0, 1]) <= MATCHGATE_TOL and abs(self.A[1, 0]) <= MATCHGATE_TOL

    def is_identity(self, tol: float = MATCHGATE_TOL) -> bool:
        """True when the gate is a global phase times the identity."""
        phase = self.A[0, 0]
        return abs(abs(phase) - 1.0) <= tol and np.max(np.abs(self.matrix - phase * np.eye(4))) <= tol

    def dagger(self) -> "Matchgate":
        return Matchgate(_frozen(self.A.conj().T), _frozen(self.B.conj().T))

    def __repr__(self) -> str:
        return f"Matchgate(A={np.round(self.A, 6).tolist()}, B={np.round(self.B, 6).tolist()})"


def validate_matchgate(A, B, tol: float = MATCHGATE_TOL) -> Matchgate:
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    for name, block in (("A", A), ("B", B)):
        if block.shape != (2, 2):
            raise DimensionMismatch(f"block {name} must be 2x2, got shape {block.shape}", {"block": name})
        residual = float(np.linalg.norm(block.conj().T @ block - np.eye(2)))
        if residual > tol:
            raise NotUnitary(name, residual)
    det_a = complex(np.linalg.det(A))
    det_b = complex(np.linalg.det(B))
    if abs(det_a - det_b) > tol:
        raise DeterminantMismatch(det_a, det_b)
    return Matchgate(_frozen(A), _frozen(B))


def matchgate_from_matrix(m, tol: float = MATCHGATE_TOL) -> Matchgate:
    """Split a 4x4 matrix into G(A, B); entries mixing the parity sectors must vanish."""
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise DimensionMismatch(f"expected a 4x4 matrix, got shape {m.shape}")
    leak = max(np.max(np.abs(m[np.ix_(_EVEN, _ODD)])), np.max(np.abs(m[np.ix_(_ODD, _EVEN)])))
    if leak > tol:
        raise MatchgateValidationError(
            f"matrix mixes even and odd parity sectors (max entry {leak:.3e})", {"leak": float(leak)}
        )
    return validate_matchgate(m[np.ix_(_EVEN, _EVEN)], m[np.ix_(_ODD, _ODD)], tol=tol)


# -----------------------------
# Gate library
# -----------------------------


def identity_gate() -> Matchgate:
    return validate_matchgate(np.eye(2), np.eye(2))


def fswap(conditioned_on_one: bool = False) -> Matchgate:
    """G(Z, X), or G(-Z, X) which swaps a |1> through instead of a |0>."""
    a = -PAULI["Z"] if conditioned_on_one else PAULI["Z"]
    return validate_matchgate(a, PAULI["X"])


def catalyst_hadamard() -> Matchgate:
    """G(H, H): acts as H on the first qubit when the second holds |+>."""
    return validate_matchgate(HADAMARD, HADAMARD)


def z_rotation(theta: float, on_second: bool = False) -> Matchgate:
    """exp(i theta Z) on the first qubit of the pair, or on the second with on_second."""
    plus, minus = np.exp(1j * theta), np.exp(-1j * theta)
    a = np.diag([plus, minus])
    b = np.diag([minus, plus]) if on_second else np.diag([plus, minus])
    return validate_matchgate(a, b)


def pauli_pair(label: str) -> np.ndarray:
    return np.kron(PAULI[label[0]], PAULI[label[1]])


def from_generators(coefficients: Dict[str, float]) -> Matchgate:
    """exp(i sum_P h_P P) over the nearest-neighbour generator set.

    Keys are two-letter Pauli labels from GENERATOR_LABELS; "XX" means X⊗X.
    """
    hamiltonian = np.zeros((4, 4), dtype=complex)
    for label, h in coefficients.items():
        if label not in GENERATOR_LABELS:
            raise MatchgateValidationError(f"{label!r} is not a matchgate generator", {"label": label})
        hamiltonian += float(h) * pauli_pair(label)
    return matchgate_from_matrix(expm(1j * hamiltonian), tol=1e-10)


def number_preserving_from_generators(hopping: float, current: float, z_first: float, z_second: float) -> Matchgate:
    """exp(i [hopping (XX+YY) + current (XY-YX) + z_first ZI + z_second IZ])."""
    return from_generators(
        {
            "XX": hopping,
            "YY": hopping,
            "XY": current,
            "YX": -current,
            "ZI": z_first,
            "IZ": z_second,
        }
    )


def random_matchgate(rng: Optional[np.random.Generator] = None, number_preserving: bool = False) -> Matchgate:
    rng = rng if rng is not None else np.random.default_rng()
    b = unitary_group.rvs(2, random_state=rng)
    if number_preserving:
        alpha = rng.uniform(-np.pi, np.pi)
        det_b = np.linalg.det(b)
        # diag(e^{i alpha}, det B e^{-i alpha}) has determinant det B by construction
        a = np.diag([np.exp(1j * alpha), det_b * np.exp(-1j * alpha)])
        return validate_matchgate(a, b)
    a = unitary_group.rvs(2, random_state=rng)
    ratio = np.linalg.det(a) / np.linalg.det(b)
    return validate_matchgate(a, b * np.sqrt(ratio))
