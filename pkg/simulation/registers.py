"""Fermionic registers: the initial Fock branches a query is averaged over.

A product input lives on n+1 modes: the preparation transfer acts on
|0..0>|+>, whose two parity components never interfere under parity-preserving
circuits, so probabilities are the average of two vacuum-sandwich evaluations.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

from errors import PbcUnsupportedForProductInput
from fermions.pbc import lower_circuit
from fermions.transfer import ModeTransfer, compose_transfer
from model.circuit import Circuit
from model.states import BasisInput, InputSpec, ProductInput
from simulation.preparation import PreparationCircuit, synthesize_preparation


Branch = Tuple[float, Tuple[int, ...]]


@dataclass(frozen=True)
class Register:
    """n_modes, the transfer applied before the circuit, and weighted occupied-mode branches."""

    n_qubits: int
    n_modes: int
    start: ModeTransfer
    branches: Tuple[Branch, ...]
    parity: Optional[int] = None
    preparation: Optional[PreparationCircuit] = None

    @property
    def catalyst_mode(self) -> Optional[int]:
        return self.n_qubits if self.n_modes > self.n_qubits else None


def build_register(spec: InputSpec, catalyst: bool = False) -> Register:
    """Register for an input; `catalyst` adds a |+> mode after a basis input."""
    n = spec.n
    if isinstance(spec, BasisInput):
        occupied = spec.occupied
        if not catalyst:
            return Register(n, n, ModeTransfer.identity(n), ((1.0, occupied),), spec.parity())
        return Register(
            n,
            n + 1,
            ModeTransfer.identity(n + 1),
            ((0.5, occupied), (0.5, occupied + (n,))),
            spec.parity(),
        )
    prep = synthesize_preparation(spec.qubits)
    start = compose_transfer(prep.circuit)
    return Register(n, n + 1, start, ((0.5, ()), (0.5, (n,))), None, prep)


def lowered_for(circuit: Circuit, spec: InputSpec) -> Circuit:
    """Circuit with wrap gates lowered for the input's parity."""
    if not circuit.has_wrap_gates:
        return circuit
    if isinstance(spec, ProductInput):
        raise PbcUnsupportedForProductInput()
    return lower_circuit(circuit, spec.parity())
