from model.circuit import (
    DEFAULT_BRANCH,
    AdaptiveProgram,
    Circuit,
    CircuitFile,
    GateApplication,
    Round,
    z_rotation_application,
)
from model.gates import (
    Matchgate,
    catalyst_hadamard,
    fswap,
    from_generators,
    identity_gate,
    matchgate_from_matrix,
    number_preserving_from_generators,
    random_matchgate,
    validate_matchgate,
    z_rotation,
)
from model.states import (
    COMPUTATIONAL,
    Basis,
    BasisInput,
    InputSpec,
    MeasuredQubit,
    MeasurementSpec,
    OutcomeAssignment,
    ProductInput,
    SingleQubitState,
)
