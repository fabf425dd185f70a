from simulation.preparation import EulerStep, PreparationCircuit, euler_single_qubit, synthesize_preparation
from simulation.registers import Register, build_register
from simulation.strong import (
    CompiledCircuit,
    ParityBranchQuery,
    ProjectorString,
    adaptive_joint_prob,
    compile_circuit,
    expectation_z,
    final_round_distribution,
    outcome_table,
    prob_full_basis,
    prob_partial_basis,
    prob_partial_product,
    probability,
    transition_amplitude,
)
from simulation.weak import (
    AdaptiveRun,
    AdaptiveShot,
    SamplerState,
    empirical_distribution,
    run_adaptive,
    sample_computational,
    sample_rotated,
    total_variation,
)
