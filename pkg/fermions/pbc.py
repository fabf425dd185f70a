"""Lowering of wrap-around gates on the pair (n, 1) to nearest-neighbour matchgates.

On a register of definite parity p the Jordan–Wigner string of a wrap gate
collapses: sigma_n tau_1 = p * (-(tau Z))_1 Z_2 ... Z_{n-1} (Z sigma)_n for
sigma, tau in {X, Y}.  The gate therefore acts as an ordinary matchgate g'_p on
the modes (1, n), which f-SWAP chains bring next to each other.
"""

import logging
from typing import Dict, List

import numpy as np

from errors import IndefiniteParity
from model.circuit import Circuit, GateApplication
from model.gates import PAULI, fswap, matchgate_from_matrix, pauli_pair


logger = logging.getLogger(__name__)

LOWERING_TOL = 1e-10

# Labels are "<on qubit n><on qubit 1>", matching the wrap gate's tensor order.
_EVEN_LABELS = ("II", "ZZ", "ZI", "IZ", "XX", "XY", "YX", "YY")


def _lowered_term(label: str, parity: int) -> np.ndarray:
    """Image on (1, 2), qubit 1 first, of the Pauli term `label` of the wrap gate."""
    on_n, on_1 = label
    if label == "II":
        return pauli_pair("II")
    if label == "ZZ":
        return pauli_pair("ZZ")
    if label == "ZI":
        return pauli_pair("IZ")
    if label == "IZ":
        return pauli_pair("ZI")
    z = PAULI["Z"]
    return -parity * np.kron(PAULI[on_1] @ z, z @ PAULI[on_n])


def pauli_coefficients(matrix: np.ndarray) -> Dict[str, complex]:
    return {label: complex(np.trace(pauli_pair(label) @ matrix) / 4.0) for label in _EVEN_LABELS}


def pbc_substitute(app: GateApplication, parity: int, n: int) -> List[GateApplication]:
    """Nearest-neighbour matchgates equal to the wrap gate on the parity-p subspace."""
    if parity not in (1, -1):
        raise IndefiniteParity(f"wrap-around lowering needs parity +1 or -1, got {parity!r}", {"parity": parity})
    if app.gate.is_identity():
        return []

    lowered = sum(c * _lowered_term(label, parity) for label, c in pauli_coefficients(app.gate.matrix).items())
    inner = GateApplication(matchgate_from_matrix(lowered, tol=LOWERING_TOL), 1)
    swap = fswap()
    down = [GateApplication(swap, pos) for pos in range(n - 1, 1, -1)]
    up = [GateApplication(swap, pos) for pos in range(2, n)]
    logger.debug(f"lowered wrap gate: n={n}, parity={parity}, gates={len(down) + 1 + len(up)}")
    return down + [inner] + up


def lower_circuit(circuit: Circuit, parity: int) -> Circuit:
    """Replace every wrap gate; linear circuits come back unchanged."""
    if not circuit.has_wrap_gates:
        return circuit
    apps: List[GateApplication] = []
    for app in circuit.gates:
        if app.wrap:
            apps.extend(pbc_substitute(app, parity, circuit.n))
        else:
            apps.append(app)
    return Circuit(circuit.n, tuple(apps), pbc=False)
