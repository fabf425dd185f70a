"""Pfaffians of antisymmetric matrices by pivoted skew elimination (Parlett–Reid LTL^T)."""

import numpy as np

from errors import NotAntisymmetric


ANTISYMMETRY_TOL = 1e-10


def antisymmetry_residual(A: np.ndarray) -> float:
    return float(np.max(np.abs(A + A.T))) if A.size else 0.0


def pfaffian(A, check: bool = True) -> complex:
    A = np.array(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotAntisymmetric(f"expected a square matrix, got shape {A.shape}", {"shape": list(A.shape)})
    if check:
        residual = antisymmetry_residual(A)
        if residual > ANTISYMMETRY_TOL:
            raise NotAntisymmetric(
                f"||A + A^T||_max = {residual:.3e} exceeds {ANTISYMMETRY_TOL:g}", {"residual": residual}
            )
    n = A.shape[0]
    if n == 0:
        return complex(1.0)
    if n % 2:
        return complex(0.0)

    result = complex(1.0)
    for k in range(0, n - 1, 2):
        # pivot: largest entry of column k below the diagonal
        kp = k + 1 + int(np.argmax(np.abs(A[k + 1 :, k])))
        if kp != k + 1:
            A[[k + 1, kp], k:] = A[[kp, k + 1], k:]
            A[k:, [k + 1, kp]] = A[k:, [kp, k + 1]]
            result = -result
        pivot = A[k, k + 1]
        if pivot == 0:
            return complex(0.0)
        result *= pivot
        if k + 2 < n:
            tau = A[k, k + 2 :] / pivot
            col = A[k + 2 :, k + 1]
            A[k + 2 :, k + 2 :] += np.outer(tau, col) - np.outer(col, tau)
    return result
