from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from errors import SchemaError


TWO_PI = 2.0 * np.pi
ANGLE_TOL = 1e-12


@dataclass(frozen=True)
class SingleQubitState:
    """cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>; global phase is not represented."""

    theta: float
    phi: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.theta <= np.pi):
            raise SchemaError(f"theta must lie in [0, pi], got {self.theta!r}", field="theta")
        if not (0.0 <= self.phi < TWO_PI):
            raise SchemaError(f"phi must lie in [0, 2pi), got {self.phi!r}", field="phi")

    @classmethod
    def canonical(cls, theta: float, phi: float = 0.0) -> "SingleQubitState":
        """Wrap phi into [0, 2pi) and clip theta rounding noise at the interval ends."""
        theta = float(theta)
        if -ANGLE_TOL < theta < 0.0:
            theta = 0.0
        elif np.pi < theta < np.pi + ANGLE_TOL:
            theta = float(np.pi)
        phi = float(np.mod(phi, TWO_PI))
        if phi >= TWO_PI:
            phi = 0.0
        return cls(theta, phi)

    @classmethod
    def from_amplitudes(cls, amplitudes: Sequence[complex]) -> "SingleQubitState":
        v = np.asarray(amplitudes, dtype=complex)
        v = v / np.linalg.norm(v)
        theta = 2.0 * np.arctan2(abs(v[1]), abs(v[0]))
        phi = float(np.angle(v[1]) - np.angle(v[0])) if abs(v[1]) > ANGLE_TOL and abs(v[0]) > ANGLE_TOL else 0.0
        return cls.canonical(theta, phi)

    @classmethod
    def zero(cls) -> "SingleQubitState":
        return cls(0.0, 0.0)

    @classmethod
    def one(cls) -> "SingleQubitState":
        return cls(float(np.pi), 0.0)

    @classmethod
    def plus(cls) -> "SingleQubitState":
        return cls(float(np.pi / 2), 0.0)

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array(
            [np.cos(self.theta / 2.0), np.exp(1j * self.phi) * np.sin(self.theta / 2.0)],
            dtype=complex,
        )

    def pauli_expectations(self) -> Tuple[float, float, float]:
        """(<X>, <Y>, <Z>) of the state."""
        s = np.sin(self.theta)
        return (s * np.cos(self.phi), s * np.sin(self.phi), float(np.cos(self.theta)))


@dataclass(frozen=True)
class Basis:
    """Single-qubit measurement basis; outcome 0 is the state (theta, phi).

    theta == 0 is the computational basis.
    """

    theta: float = 0.0
    phi: float = 0.0

    @property
    def is_computational(self) -> bool:
        return self.theta == 0.0

    @property
    def vectors(self) -> Tuple[np.ndarray, np.ndarray]:
        c, s = np.cos(self.theta / 2.0), np.sin(self.theta / 2.0)
        zero = np.array([c, np.exp(1j * self.phi) * s], dtype=complex)
        one = np.array([-np.exp(-1j * self.phi) * s, c], dtype=complex)
        return zero, one

    def state(self) -> SingleQubitState:
        return SingleQubitState.canonical(self.theta, self.phi)

    def flipped_azimuth(self) -> "Basis":
        """Same polar angle with phi shifted by pi (X and Y components negated)."""
        return Basis(self.theta, float(np.mod(self.phi + np.pi, TWO_PI)))


COMPUTATIONAL = Basis(0.0, 0.0)


# -----------------------------
# Inputs
# -----------------------------


def _check_bits(bits: str, what: str) -> None:
    if not bits or any(ch not in "01" for ch in bits):
        raise SchemaError(f"{what} must be a non-empty string of 0/1, got {bits!r}", field=what)


@dataclass(frozen=True)
class BasisInput:
    bits: str

    def __post_init__(self) -> None:
        _check_bits(self.bits, "bits")

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def occupied(self) -> Tuple[int, ...]:
        """0-based modes holding a 1."""
        return tuple(i for i, ch in enumerate(self.bits) if ch == "1")

    def parity(self) -> int:
        return -1 if self.bits.count("1") % 2 else 1

    def as_product(self) -> "ProductInput":
        return ProductInput(tuple(SingleQubitState.one() if ch == "1" else SingleQubitState.zero() for ch in self.bits))


@dataclass(frozen=True)
class ProductInput:
    qubits: Tuple[SingleQubitState, ...]

    def __post_init__(self) -> None:
        if not self.qubits:
            raise SchemaError("product input needs at least one qubit", field="qubits")

    @property
    def n(self) -> int:
        return len(self.qubits)

    def parity(self) -> Optional[int]:
        return None

    def as_product(self) -> "ProductInput":
        return self


InputSpec = Union[BasisInput, ProductInput]


# -----------------------------
# Measurements and outcomes
# -----------------------------


@dataclass(frozen=True)
class MeasuredQubit:
    qubit: int
    bit: int
    basis: Basis = COMPUTATIONAL


@dataclass(frozen=True)
class OutcomeAssignment:
    """Bits assigned to a subset of qubits (1-based), in listed order."""

    entries: Tuple[MeasuredQubit, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise SchemaError("an outcome assignment needs at least one qubit", field="measure")
        qubits = [e.qubit for e in self.entries]
        if len(set(qubits)) != len(qubits):
            raise SchemaError(f"measured qubits must be distinct, got {qubits}", field="measure")
        for e in self.entries:
            if e.bit not in (0, 1):
                raise SchemaError(f"bit for qubit {e.qubit} must be 0 or 1, got {e.bit!r}", field="measure")

    @classmethod
    def of(cls, bits: Dict[int, int], bases: Optional[Dict[int, Basis]] = None) -> "OutcomeAssignment":
        bases = bases or {}
        return cls(tuple(MeasuredQubit(q, int(b), bases.get(q, COMPUTATIONAL)) for q, b in bits.items()))

    @classmethod
    def from_bits(cls, qubits: Sequence[int], bits: Union[str, Sequence[int]]) -> "OutcomeAssignment":
        values = [int(ch) for ch in bits]
        if len(values) != len(qubits):
            raise SchemaError(f"{len(values)} bits given for {len(qubits)} qubits", field="outcome")
        return cls(tuple(MeasuredQubit(q, b) for q, b in zip(qubits, values)))

    @property
    def qubits(self) -> Tuple[int, ...]:
        return tuple(e.qubit for e in self.entries)

    @property
    def bitstring(self) -> str:
        return "".join(str(e.bit) for e in self.entries)

    @property
    def all_computational(self) -> bool:
        return all(e.basis.is_computational for e in self.entries)

    def check_range(self, n: int) -> None:
        for e in self.entries:
            if not 1 <= e.qubit <= n:
                raise SchemaError(f"qubit {e.qubit} outside 1..{n}", field="measure")
        if len(self.entries) > n:
            raise SchemaError(f"{len(self.entries)} qubits measured on an {n}-qubit register", field="measure")

    def extended(self, qubit: int, bit: int, basis: Basis = COMPUTATIONAL) -> "OutcomeAssignment":
        return OutcomeAssignment(self.entries + (MeasuredQubit(qubit, bit, basis),))


@dataclass(frozen=True)
class MeasurementSpec:
    """Which qubits are read out and in which bases; bits come later."""

    qubits: Tuple[int, ...]
    bases: Tuple[Basis, ...]

    def __post_init__(self) -> None:
        if len(self.qubits) != len(self.bases):
            raise SchemaError("every measured qubit needs a basis", field="measure")
        if len(set(self.qubits)) != len(self.qubits):
            raise SchemaError(f"measured qubits must be distinct, got {list(self.qubits)}", field="measure")

    @classmethod
    def computational(cls, qubits: Iterable[int]) -> "MeasurementSpec":
        qubits = tuple(qubits)
        return cls(qubits, tuple(COMPUTATIONAL for _ in qubits))

    @property
    def size(self) -> int:
        return len(self.qubits)

    @property
    def all_computational(self) -> bool:
        return all(b.is_computational for b in self.bases)

    def assign(self, bits: Union[str, Sequence[int]]) -> OutcomeAssignment:
        values = [int(ch) for ch in bits]
        if len(values) != len(self.qubits):
            raise SchemaError(
                f"outcome has {len(values)} bits but {len(self.qubits)} qubits are measured", field="outcome"
            )
        return OutcomeAssignment(tuple(MeasuredQubit(q, b, basis) for q, b, basis in zip(self.qubits, values, self.bases)))
