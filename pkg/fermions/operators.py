from dataclasses import dataclass
from typing import Tuple

import numpy as np

from errors import DimensionMismatch


# Majorana convention (0-based internally): c_{2p} = (prod_{j<p} Z_j) X_p and
# c_{2p+1} = (prod_{j<p} Z_j) Y_p, so a_p = (c_{2p} + i c_{2p+1}) / 2 and
# a†_p = (c_{2p} - i c_{2p+1}) / 2.  a_p acts locally as |0><1|.


def majorana_index(qubit: int, kind: str) -> int:
    """1-based Majorana label: c_{2k-1} comes from X_k, c_{2k} from Y_k."""
    return 2 * qubit - 1 if kind == "X" else 2 * qubit


@dataclass(frozen=True, eq=False)
class LinearFermionicOperator:
    """sum_p alpha_p a_p + beta_p a†_p over n modes."""

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self) -> None:
        if self.alpha.shape != self.beta.shape or self.alpha.ndim != 1:
            raise DimensionMismatch(
                f"alpha {self.alpha.shape} and beta {self.beta.shape} must be equal-length vectors"
            )

    @property
    def n(self) -> int:
        return int(self.alpha.shape[0])

    @property
    def is_zero(self) -> bool:
        return not (np.any(self.alpha) or np.any(self.beta))

    def majorana_coefficients(self) -> np.ndarray:
        gamma = np.empty(2 * self.n, dtype=complex)
        gamma[0::2] = (self.alpha + self.beta) / 2.0
        gamma[1::2] = 1j * (self.alpha - self.beta) / 2.0
        return gamma

    @classmethod
    def from_majorana(cls, gamma: np.ndarray) -> "LinearFermionicOperator":
        even, odd = gamma[0::2], gamma[1::2]
        return cls(even - 1j * odd, even + 1j * odd)

    def dagger(self) -> "LinearFermionicOperator":
        return LinearFermionicOperator(self.beta.conj(), self.alpha.conj())

    def __add__(self, other: "LinearFermionicOperator") -> "LinearFermionicOperator":
        if other.n != self.n:
            raise DimensionMismatch(f"operators on {self.n} and {other.n} modes")
        return LinearFermionicOperator(self.alpha + other.alpha, self.beta + other.beta)

    def __mul__(self, scalar: complex) -> "LinearFermionicOperator":
        return LinearFermionicOperator(self.alpha * scalar, self.beta * scalar)

    __rmul__ = __mul__


def annihilator(mode: int, n: int) -> LinearFermionicOperator:
    alpha = np.zeros(n, dtype=complex)
    alpha[mode] = 1.0
    return LinearFermionicOperator(alpha, np.zeros(n, dtype=complex))


def creator(mode: int, n: int) -> LinearFermionicOperator:
    beta = np.zeros(n, dtype=complex)
    beta[mode] = 1.0
    return LinearFermionicOperator(np.zeros(n, dtype=complex), beta)


def projector_pair(mode: int, bit: int, n: int) -> Tuple[LinearFermionicOperator, LinearFermionicOperator]:
    """(a†, a) projects mode onto 1, (a, a†) onto 0."""
    if bit:
        return creator(mode, n), annihilator(mode, n)
    return annihilator(mode, n), creator(mode, n)
