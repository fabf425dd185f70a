"""Product-state preparation with a |+> catalyst qubit.

Each target state is built on qubit n from H and Z-rotations, where H is the
matchgate G(H, H) against the |+> ancilla on qubit n+1, and is then carried up
to its place through |0> qubits by f-SWAPs.
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from model.circuit import Circuit, GateApplication
from model.gates import HADAMARD, catalyst_hadamard, fswap, z_rotation
from model.states import SingleQubitState


logger = logging.getLogger(__name__)

ELISION_TOL = 1e-12


@dataclass(frozen=True)
class EulerStep:
    """H, or Rz(angle) = exp(-i angle Z / 2)."""

    kind: str
    angle: float = 0.0

    def matrix(self) -> np.ndarray:
        if self.kind == "H":
            return HADAMARD
        half = self.angle / 2.0
        return np.diag([np.exp(-1j * half), np.exp(1j * half)])

    def inverse(self) -> "EulerStep":
        return self if self.kind == "H" else EulerStep("Rz", canonical_angle(-self.angle))


def canonical_angle(angle: float) -> float:
    """Representative in (-pi, pi]."""
    wrapped = float(np.mod(angle + np.pi, 2.0 * np.pi) - np.pi)
    return float(np.pi) if wrapped <= -np.pi else wrapped


def _rz(angle: float) -> List[EulerStep]:
    angle = canonical_angle(angle)
    return [] if abs(angle) <= ELISION_TOL else [EulerStep("Rz", angle)]


def euler_single_qubit(state: SingleQubitState) -> List[EulerStep]:
    """Steps in time order taking |0> to `state` up to a global phase."""
    theta, phi = state.theta, state.phi
    if theta <= ELISION_TOL:
        return []
    if abs(theta - np.pi / 2.0) <= ELISION_TOL:
        return [EulerStep("H")] + _rz(phi)
    # H Rz(theta) H |0> = cos(theta/2)|0> - i sin(theta/2)|1> up to phase
    steps = [EulerStep("H")] + _rz(theta) + [EulerStep("H")]
    if abs(theta - np.pi) > ELISION_TOL:
        steps += _rz(phi + np.pi / 2.0)
    return steps


def steps_unitary(steps: Sequence[EulerStep]) -> np.ndarray:
    u = np.eye(2, dtype=complex)
    for step in steps:
        u = step.matrix() @ u
    return u


def step_gates(steps: Sequence[EulerStep], position: int) -> List[GateApplication]:
    """Steps on qubit `position` with the catalyst on position+1."""
    gates = []
    for step in steps:
        if step.kind == "H":
            gates.append(GateApplication(catalyst_hadamard(), position))
        else:
            gates.append(GateApplication(z_rotation(-step.angle / 2.0), position))
    return gates


@dataclass(frozen=True)
class PreparationCircuit:
    """U on n+1 qubits with U |0..0>|+> = |psi_1>..|psi_n>|+>; the ancilla is qubit n+1."""

    circuit: Circuit
    steps: Tuple[Tuple[EulerStep, ...], ...]

    @property
    def ancilla(self) -> int:
        return self.circuit.n


def synthesize_preparation(states: Sequence[SingleQubitState]) -> PreparationCircuit:
    n = len(states)
    gates: List[GateApplication] = []
    all_steps = []
    swap = fswap()
    for i, state in enumerate(states, start=1):
        steps = euler_single_qubit(state)
        all_steps.append(tuple(steps))
        if not steps:
            continue
        gates.extend(step_gates(steps, n))
        gates.extend(GateApplication(swap, pos) for pos in range(n - 1, i - 1, -1))
    logger.debug(f"preparation circuit: n={n}, gates={len(gates)}")
    return PreparationCircuit(Circuit(n + 1, tuple(gates)), tuple(all_steps))
