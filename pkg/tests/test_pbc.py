import numpy as np
import pytest

from errors import IndefiniteParity, PbcUnsupportedForProductInput
from fermions.pbc import lower_circuit, pauli_coefficients, pbc_substitute
from model.circuit import Circuit, GateApplication
from model.gates import from_generators, fswap, identity_gate, pauli_pair, random_matchgate
from model.states import BasisInput
from oracle.statevector import circuit_state, input_state, run_circuit
from simulation.registers import lowered_for

from conftest import build_random_bits, build_random_circuit, build_random_product


class TestSubstitution:
    def test_identity_wrap_gate_disappears(self):
        assert pbc_substitute(GateApplication(identity_gate(), 4, wrap=True), 1, 4) == []

    def test_parity_must_be_definite(self):
        with pytest.raises(IndefiniteParity):
            pbc_substitute(GateApplication(fswap(), 4, wrap=True), 0, 4)

    def test_gate_layout(self, rng):
        apps = pbc_substitute(GateApplication(random_matchgate(rng), 5, wrap=True), -1, 5)
        assert [a.position for a in apps] == [4, 3, 2, 1, 2, 3, 4]
        assert not any(a.wrap for a in apps)

    def test_two_qubit_register(self, rng):
        apps = pbc_substitute(GateApplication(random_matchgate(rng), 2, wrap=True), 1, 2)
        assert [a.position for a in apps] == [1]

    def test_pauli_expansion_reconstructs_the_gate(self, rng):
        g = random_matchgate(rng)
        rebuilt = sum(c * pauli_pair(label) for label, c in pauli_coefficients(g.matrix).items())
        np.testing.assert_allclose(rebuilt, g.matrix, atol=1e-12)

    @pytest.mark.parametrize("n", [3, 4, 6])
    @pytest.mark.parametrize("theta", [0.4, 1.3])
    def test_odd_parity_reverses_the_xx_angle(self, n, theta):
        odd = pbc_substitute(GateApplication(from_generators({"XX": theta}), n, wrap=True), -1, n)
        even = pbc_substitute(GateApplication(from_generators({"XX": -theta}), n, wrap=True), 1, n)
        assert [a.position for a in odd] == [a.position for a in even]
        for a, b in zip(odd, even):
            np.testing.assert_allclose(a.gate.matrix, b.gate.matrix, atol=1e-12)


class TestLoweredCircuits:
    @pytest.mark.parametrize("n", [2, 3, 4, 5, 7])
    @pytest.mark.parametrize("parity", [1, -1])
    def test_matches_true_wrap_gate_on_parity_subspace(self, rng, n, parity):
        circuit = build_random_circuit(rng, n, 3 * n, wraps=3)
        x = BasisInput(build_random_bits(rng, n, parity))
        exact = circuit_state(circuit, x)
        lowered = run_circuit(input_state(x), lower_circuit(circuit, parity))
        np.testing.assert_allclose(lowered.amplitudes, exact.amplitudes, atol=1e-10)

    def test_linear_circuits_pass_through(self, rng):
        circuit = build_random_circuit(rng, 4, 5)
        assert lower_circuit(circuit, 1) is circuit

    def test_lowering_uses_the_input_parity(self, rng):
        circuit = build_random_circuit(rng, 4, 4, wraps=1)
        lowered = lowered_for(circuit, BasisInput("0100"))
        assert not lowered.pbc
        assert lowered.gate_count == 4 + 5

    def test_product_inputs_are_rejected(self, rng):
        circuit = build_random_circuit(rng, 4, 4, wraps=1)
        with pytest.raises(PbcUnsupportedForProductInput):
            lowered_for(circuit, build_random_product(rng, 4))

    def test_number_preserving_wrap(self, rng):
        circuit = build_random_circuit(rng, 5, 10, number_preserving=True, wraps=2)
        x = BasisInput("10110")
        exact = circuit_state(circuit, x)
        lowered = run_circuit(input_state(x), lower_circuit(circuit, x.parity()))
        np.testing.assert_allclose(lowered.amplitudes, exact.amplitudes, atol=1e-10)

    def test_wrapped_file_stays_pbc_circuit(self):
        circuit = Circuit(3, (GateApplication(fswap(), 3, wrap=True),), pbc=True)
        assert lower_circuit(circuit, 1).gate_count == 3
