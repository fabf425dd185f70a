"""Randomized cross-checks at full case counts. Deselected by default; run with `pytest -m slow`."""

from itertools import product

import numpy as np
import pytest

from model.states import BasisInput, OutcomeAssignment
from oracle import statevector as dense
from simulation.strong import (
    adaptive_joint_prob,
    compile_circuit,
    expectation_z,
    prob_full_basis,
    probability,
)

from conftest import build_random_bits, build_random_circuit, build_random_product, build_two_round_program

pytestmark = pytest.mark.slow

TOL = 1e-9


def _subsets(rng, n, count=3):
    for _ in range(count):
        k = int(rng.integers(1, n + 1))
        yield sorted(int(q) for q in rng.choice(np.arange(1, n + 1), size=k, replace=False))


def test_basis_inputs_two_hundred_circuits(rng):
    for case in range(200):
        n = int(rng.integers(2, 9))
        circuit = build_random_circuit(rng, n, int(rng.integers(0, 41)), number_preserving=case % 2 == 0)
        x = BasisInput(build_random_bits(rng, n))
        compiled = compile_circuit(circuit, x)
        sv = dense.circuit_state(circuit, x)
        for y, expected in dense.exact_distribution(sv, list(range(1, n + 1))).items():
            assert prob_full_basis(compiled, x, y) == pytest.approx(expected, abs=TOL)
        for subset in _subsets(rng, n):
            for bits, expected in dense.exact_distribution(sv, subset).items():
                got = probability(compiled, OutcomeAssignment.from_bits(subset, bits))
                assert got == pytest.approx(expected, abs=TOL)


def test_determinant_and_pfaffian_paths_agree(rng):
    for _ in range(40):
        n = int(rng.integers(2, 7))
        circuit = build_random_circuit(rng, n, 15, number_preserving=True)
        for x in ("".join(b) for b in product("01", repeat=n)):
            compiled = compile_circuit(circuit, BasisInput(x))
            y = build_random_bits(rng, n)
            if y.count("1") != x.count("1"):
                continue
            pfaffian_path = probability(compiled, OutcomeAssignment.from_bits(range(1, n + 1), y))
            assert prob_full_basis(compiled, x, y) == pytest.approx(pfaffian_path, abs=TOL)


def test_product_inputs_expectations(rng):
    for _ in range(100):
        n = int(rng.integers(2, 9))
        circuit = build_random_circuit(rng, n, 20)
        spec = build_random_product(rng, n)
        compiled = compile_circuit(circuit, spec)
        sv = dense.circuit_state(circuit, spec)
        for k in range(1, n + 1):
            z = expectation_z(compiled, spec, k)
            assert z == pytest.approx(dense.expectation_z(sv, k), abs=TOL)
            assert z == pytest.approx(1.0 - 2.0 * probability(compiled, OutcomeAssignment.of({k: 1})), abs=TOL)


def test_product_inputs_marginals(rng):
    for _ in range(100):
        n = int(rng.integers(2, 9))
        circuit = build_random_circuit(rng, n, 20)
        spec = build_random_product(rng, n)
        compiled = compile_circuit(circuit, spec)
        sv = dense.circuit_state(circuit, spec)
        for subset in _subsets(rng, n, 2):
            table = dense.exact_distribution(sv, subset)
            total = 0.0
            for bits, expected in table.items():
                got = probability(compiled, OutcomeAssignment.from_bits(subset, bits))
                assert got == pytest.approx(expected, abs=TOL)
                total += got
            assert total == pytest.approx(1.0, abs=1e-8)


def test_adaptive_programs(rng):
    for _ in range(50):
        n = int(rng.integers(2, 7))
        program = build_two_round_program(rng, n, 8)
        spec = BasisInput(build_random_bits(rng, n))
        for trace, expected in dense.trace_distribution(program, spec).items():
            assignments, index = [], 0
            for bits in trace:
                assignments.append(program.rounds[index].measure.assign(bits))
                index = program.rounds[index].next_round(bits)
            assert adaptive_joint_prob(program, spec, assignments) == pytest.approx(expected, abs=TOL)


def test_wrap_around_circuits(rng):
    for _ in range(30):
        n = int(rng.integers(3, 8))
        circuit = build_random_circuit(rng, n, 12, wraps=int(rng.integers(1, 4)))
        x = BasisInput(build_random_bits(rng, n))
        compiled = compile_circuit(circuit, x)
        sv = dense.circuit_state(circuit, x)
        for y, expected in dense.exact_distribution(sv, list(range(1, n + 1))).items():
            got = probability(compiled, OutcomeAssignment.from_bits(range(1, n + 1), y))
            assert got == pytest.approx(expected, abs=TOL)


def test_parity_superselection(rng):
    cases = 0
    while cases < 10_000:
        n = int(rng.integers(2, 9))
        circuit = build_random_circuit(rng, n, 20)
        x = BasisInput(build_random_bits(rng, n))
        compiled = compile_circuit(circuit, x)
        for _ in range(20):
            y = build_random_bits(rng, n, parity=-x.parity())
            assert prob_full_basis(compiled, x, y) <= 1e-12
            cases += 1
