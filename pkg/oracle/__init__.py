from oracle.statevector import (
    MAX_QUBITS,
    StateVector,
    apply_gate,
    assignment_probability,
    basis_state,
    circuit_state,
    exact_distribution,
    expectation_z,
    jordan_wigner_operators,
    product_state,
    project_and_renormalize,
    trace_distribution,
)
