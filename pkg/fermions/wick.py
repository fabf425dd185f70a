from typing import Sequence

import numpy as np

from errors import DimensionMismatch, NotNumberPreserving
from fermions.operators import LinearFermionicOperator
from fermions.pfaffian import pfaffian


def contract_pair(f: LinearFermionicOperator, g: LinearFermionicOperator) -> complex:
    """<0| f g |0>: only a_p from f against a†_p from g survives."""
    if f.n != g.n:
        raise DimensionMismatch(f"operators on {f.n} and {g.n} modes")
    return complex(np.dot(f.alpha, g.beta))


def contraction_matrix(ops: Sequence[LinearFermionicOperator]) -> np.ndarray:
    """Antisymmetric A with A[j, k] = <0| f_j f_k |0> for j < k."""
    if not ops:
        return np.zeros((0, 0), dtype=complex)
    n = ops[0].n
    for op in ops:
        if op.n != n:
            raise DimensionMismatch(f"operators on {n} and {op.n} modes in one product")
    alpha = np.stack([op.alpha for op in ops])
    beta = np.stack([op.beta for op in ops])
    upper = np.triu(alpha @ beta.T, 1)
    return upper - upper.T


def vacuum_expectation(ops: Sequence[LinearFermionicOperator]) -> complex:
    """<0| f_1 f_2 ... f_m |0> by Wick's theorem."""
    if len(ops) % 2:
        return complex(0.0)
    if any(op.is_zero for op in ops):
        return complex(0.0)
    return pfaffian(contraction_matrix(ops), check=False)


def determinant_amplitude(R: np.ndarray, x: str, y: str) -> complex:
    """det of R restricted to rows at the ones of x and columns at the ones of y.

    With the circuit's vacuum phase this is <y|M|x> for number-preserving M.
    """
    R = np.asarray(R)
    if len(x) != R.shape[0] or len(y) != R.shape[1]:
        raise DimensionMismatch(f"bitstrings of length {len(x)}/{len(y)} for an {R.shape} block")
    rows = [i for i, ch in enumerate(x) if ch == "1"]
    cols = [j for j, ch in enumerate(y) if ch == "1"]
    if len(rows) != len(cols):
        return complex(0.0)
    if not rows:
        return complex(1.0)
    return complex(np.linalg.det(R[np.ix_(rows, cols)]))


def require_number_preserving(r_prime: np.ndarray, tol: float = 1e-12) -> None:
    size = float(np.max(np.abs(r_prime))) if r_prime.size else 0.0
    if size > tol:
        raise NotNumberPreserving(
            f"circuit creates or annihilates pairs (||R'||_max = {size:.3e})", {"r_prime_max": size}
        )
