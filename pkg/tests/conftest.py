from pathlib import Path
from typing import Callable, List, Optional

import numpy as np
import pytest

from data.circuit_file import serialize_circuit
from model.circuit import AdaptiveProgram, Circuit, CircuitFile, GateApplication, Round
from model.gates import random_matchgate
from model.states import InputSpec, MeasurementSpec, ProductInput, SingleQubitState


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


def build_random_circuit(
    rng: np.random.Generator,
    n: int,
    depth: int,
    number_preserving: bool = False,
    wraps: int = 0,
) -> Circuit:
    """`depth` random nearest-neighbour matchgates plus `wraps` wrap-around gates at random places."""
    apps: List[GateApplication] = [
        GateApplication(random_matchgate(rng, number_preserving), int(rng.integers(1, n))) for _ in range(depth)
    ]
    for _ in range(wraps):
        at = int(rng.integers(0, len(apps) + 1))
        apps.insert(at, GateApplication(random_matchgate(rng, number_preserving), n, wrap=True))
    return Circuit(n, tuple(apps), pbc=wraps > 0)


def build_random_product(rng: np.random.Generator, n: int) -> ProductInput:
    return ProductInput(
        tuple(SingleQubitState(float(rng.uniform(0, np.pi)), float(rng.uniform(0, 2 * np.pi))) for _ in range(n))
    )


def build_random_bits(rng: np.random.Generator, n: int, parity: Optional[int] = None) -> str:
    bits = "".join(str(b) for b in rng.integers(0, 2, n))
    if parity is not None and (-1) ** bits.count("1") != parity:
        bits = ("1" if bits[0] == "0" else "0") + bits[1:]
    return bits


def build_two_round_program(rng: np.random.Generator, n: int, depth: int) -> AdaptiveProgram:
    """Round 0 measures one qubit and branches to one of two terminal rounds."""
    first = build_random_circuit(rng, n, depth)
    q0 = int(rng.integers(1, n + 1))
    rounds = [
        Round(first, MeasurementSpec.computational([q0]), (("0", 1), ("1", 2))),
        Round(build_random_circuit(rng, n, depth), MeasurementSpec.computational([1, n])),
        Round(build_random_circuit(rng, n, depth), MeasurementSpec.computational([n])),
    ]
    return AdaptiveProgram(n, tuple(rounds))


@pytest.fixture
def make_circuit(rng) -> Callable[..., Circuit]:
    return lambda n, depth, **kw: build_random_circuit(rng, n, depth, **kw)


@pytest.fixture
def make_product(rng) -> Callable[[int], ProductInput]:
    return lambda n: build_random_product(rng, n)


@pytest.fixture
def write_circuit_file(tmp_path) -> Callable[..., Path]:
    """Serialize a CircuitFile into tmp_path and return its path."""
    counter = {"n": 0}

    def _write(doc: CircuitFile, name: Optional[str] = None) -> Path:
        counter["n"] += 1
        path = tmp_path / (name or f"circuit_{counter['n']}.json")
        path.write_text(serialize_circuit(doc))
        return path

    return _write


def identity_file(n: int, spec: InputSpec, measure: Optional[MeasurementSpec] = None, bits: Optional[str] = None):
    return CircuitFile(Circuit(n), spec, measure, bits)
