from typing import Any, Dict, Optional


class MatchgateSimError(Exception):
    """Base error. `details` carries structured context for diagnostics."""

    exit_code = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {"error": type(self).__name__, "message": self.message, "details": self.details}


# -----------------------------
# Input / validation (exit 2)
# -----------------------------


class InputError(MatchgateSimError):
    exit_code = 2


class SchemaError(InputError):
    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None, **details: Any):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field {field}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message, {"line": line, "field": field, **details})
        self.line = line
        self.field = field


class MatchgateValidationError(InputError):
    pass


class NotUnitary(MatchgateValidationError):
    def __init__(self, block: str, residual: float):
        super().__init__(
            f"block {block} is not unitary (||U^dag U - I||_F = {residual:.3e})",
            {"block": block, "residual": residual},
        )


class DeterminantMismatch(MatchgateValidationError):
    def __init__(self, det_a: complex, det_b: complex):
        gap = abs(det_a - det_b)
        super().__init__(
            f"det A != det B (|det A - det B| = {gap:.3e})",
            {"det_A": [det_a.real, det_a.imag], "det_B": [det_b.real, det_b.imag], "gap": gap},
        )


class DimensionMismatch(InputError):
    pass


class DimensionGuard(InputError):
    def __init__(self, n: int, limit: int):
        super().__init__(
            f"dense oracle refuses {n} qubits (hard limit {limit})",
            {"n": n, "limit": limit},
        )


class IndefiniteParity(InputError):
    pass


class NotNumberPreserving(InputError):
    pass


class PbcUnsupportedForProductInput(InputError):
    def __init__(self) -> None:
        super().__init__("wrap-around gates cannot be combined with product-state inputs")


class BranchMismatch(InputError):
    pass


class ImpossibleOutcome(InputError):
    def __init__(self, qubit: int, bit: int, probability: float):
        super().__init__(
            f"outcome {bit} on qubit {qubit} has probability {probability:.3e}",
            {"qubit": qubit, "bit": bit, "probability": probability},
        )


# -----------------------------
# Numerical integrity (exit 1)
# -----------------------------


class NumericalIntegrityError(MatchgateSimError):
    exit_code = 1


class NotLinearizable(NumericalIntegrityError):
    pass


class NotAntisymmetric(NumericalIntegrityError):
    pass


class ImaginaryResidual(NumericalIntegrityError):
    def __init__(self, value: complex, context: str = ""):
        super().__init__(
            f"imaginary residual {value.imag:.3e} exceeds tolerance{f' ({context})' if context else ''}",
            {"real": value.real, "imag": value.imag, "context": context},
        )


class ProbabilityOutOfRange(NumericalIntegrityError):
    def __init__(self, value: float, context: str = ""):
        super().__init__(
            f"probability {value!r} outside [-1e-9, 1+1e-9]{f' ({context})' if context else ''}",
            {"value": value, "context": context},
        )


class DegenerateConditional(NumericalIntegrityError):
    def __init__(self, prefix: str, probability: float):
        super().__init__(
            f"prefix {prefix!r} has probability {probability:.3e}; conditional undefined",
            {"prefix": prefix, "probability": probability},
        )
