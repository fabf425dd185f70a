import time

import numpy as np
import pytest

from model.states import BasisInput, OutcomeAssignment
from simulation.strong import compile_circuit, probability

from conftest import build_random_bits, build_random_circuit

pytestmark = pytest.mark.slow


def _marginal_seconds(rng, n: int, gates: int, k: int = 5) -> float:
    circuit = build_random_circuit(rng, n, gates)
    x = BasisInput(build_random_bits(rng, n))
    qubits = sorted(int(q) for q in rng.choice(np.arange(1, n + 1), size=k, replace=False))
    assignment = OutcomeAssignment.from_bits(qubits, build_random_bits(rng, k))
    start = time.perf_counter()
    p = probability(compile_circuit(circuit, x), assignment)
    elapsed = time.perf_counter() - start
    assert 0.0 <= p <= 1.0
    return elapsed


def test_four_hundred_qubits_in_under_a_minute(rng):
    assert _marginal_seconds(rng, 400, 4000) < 60.0


def test_runtime_grows_polynomially(rng):
    sizes = [50, 100, 200, 400]
    times = [min(_marginal_seconds(rng, n, 10 * n) for _ in range(2)) for n in sizes]
    slope, _ = np.polyfit(np.log(sizes), np.log(times), 1)
    assert slope <= 3.5
