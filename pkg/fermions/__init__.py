from fermions.operators import LinearFermionicOperator, annihilator, creator, majorana_index, projector_pair
from fermions.pbc import lower_circuit, pbc_substitute
from fermions.pfaffian import pfaffian
from fermions.transfer import (
    ModePermutation,
    ModeTransfer,
    compose_transfer,
    gate_mode_action,
    permutation_transfer,
    permute_modes,
)
from fermions.wick import contract_pair, contraction_matrix, determinant_amplitude, vacuum_expectation
