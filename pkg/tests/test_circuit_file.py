import json

import numpy as np
import pytest

from data.circuit_file import circuit_file_to_dict, matrix_to_pairs, parse_circuit, serialize_circuit
from errors import DeterminantMismatch, SchemaError
from model.circuit import CircuitFile
from model.gates import fswap
from model.states import BasisInput, ProductInput

from conftest import build_random_circuit, build_random_product, build_two_round_program

FSWAP_A = [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]
FSWAP_B = [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]


def _doc(**overrides):
    doc = {
        "n": 3,
        "gates": [{"pos": 1, "A": FSWAP_A, "B": FSWAP_B}],
        "input": {"type": "basis", "bits": "100"},
        "measure": [{"qubit": 2, "basis": "Z"}],
    }
    doc.update(overrides)
    return doc


class TestParse:
    def test_fswap_file(self):
        doc = parse_circuit(json.dumps(_doc()))
        assert doc.circuit.n == 3
        assert doc.circuit.gate_count == 1
        np.testing.assert_allclose(doc.circuit.gates[0].gate.matrix, fswap().matrix)
        assert doc.input == BasisInput("100")
        assert doc.measure.qubits == (2,)
        assert doc.assignments() == []

    def test_measure_bits_make_an_assignment(self):
        doc = parse_circuit(json.dumps(_doc(measure=[{"qubit": 2, "bit": 1}, {"qubit": 1, "bit": 0}])))
        (assignment,) = doc.assignments()
        assert assignment.qubits == (2, 1)
        assert assignment.bitstring == "10"

    def test_partial_bits_are_rejected(self):
        with pytest.raises(SchemaError):
            parse_circuit(json.dumps(_doc(measure=[{"qubit": 2, "bit": 1}, {"qubit": 1}])))

    def test_rotated_basis(self):
        doc = parse_circuit(json.dumps(_doc(measure=[{"qubit": 1, "basis": {"theta": 1.2, "phi": 0.4}}])))
        assert doc.measure.bases[0].theta == 1.2
        assert not doc.measure.all_computational

    def test_product_input(self):
        doc = parse_circuit(
            json.dumps(_doc(input={"type": "product", "qubits": [{"theta": 0.5}, {"theta": 1.0, "phi": 3.0}, {"theta": 0}]}))
        )
        assert isinstance(doc.input, ProductInput)
        assert doc.input.qubits[1].phi == 3.0

    def test_bytes_input(self):
        assert parse_circuit(json.dumps(_doc()).encode()).circuit.n == 3


class TestDiagnostics:
    def test_determinant_mismatch_names_the_gate(self):
        bad = {"pos": 2, "A": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]], "B": FSWAP_B}
        with pytest.raises(DeterminantMismatch) as exc:
            parse_circuit(json.dumps(_doc(gates=[{"pos": 1, "A": FSWAP_A, "B": FSWAP_B}, bad])))
        assert "gates[1]" in exc.value.message
        assert exc.value.details["field"] == "gates[1]"

    def test_malformed_number(self):
        text = json.dumps(_doc()).replace("[1, 0]", '[1, "one"]', 1)
        with pytest.raises(SchemaError) as exc:
            parse_circuit(text)
        assert exc.value.field.startswith("gates[0].A")

    def test_invalid_json_reports_the_line(self):
        with pytest.raises(SchemaError) as exc:
            parse_circuit('{\n  "n": 3,\n  "gates": [1.0.0]\n}')
        assert exc.value.line == 3

    def test_unknown_field(self):
        with pytest.raises(SchemaError):
            parse_circuit(json.dumps(_doc(extra=1)))

    def test_input_length(self):
        with pytest.raises(SchemaError) as exc:
            parse_circuit(json.dumps(_doc(input={"type": "basis", "bits": "10"})))
        assert exc.value.field == "input"

    def test_wrap_gate_needs_pbc(self):
        gates = [{"pos": 3, "pbc": True, "A": FSWAP_A, "B": FSWAP_B}]
        with pytest.raises(SchemaError):
            parse_circuit(json.dumps(_doc(gates=gates)))
        assert parse_circuit(json.dumps(_doc(gates=gates, pbc=True))).circuit.has_wrap_gates

    def test_angles_out_of_range(self):
        with pytest.raises(SchemaError) as exc:
            parse_circuit(json.dumps(_doc(input={"type": "product", "qubits": [{"theta": 4.0}] * 3})))
        assert exc.value.field == "input.qubits[0].theta"

    def test_adaptive_file_cannot_carry_gates(self):
        rounds = [{"gates": [], "measure": [{"qubit": 1}]}]
        with pytest.raises(SchemaError):
            parse_circuit(json.dumps(_doc(rounds=rounds)))

    def test_adaptive_round_gate_paths(self):
        bad = {"pos": 1, "A": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]], "B": FSWAP_B}
        rounds = [{"gates": [bad], "measure": [{"qubit": 1}]}]
        with pytest.raises(DeterminantMismatch) as exc:
            parse_circuit(json.dumps({"n": 3, "rounds": rounds, "input": {"type": "basis", "bits": "000"}}))
        assert exc.value.details["field"] == "rounds[0].gates[0]"


class TestCanonicalText:
    def test_serialize_is_a_fixed_point(self, rng):
        circuit = build_random_circuit(rng, 4, 6, wraps=1)
        text = serialize_circuit(CircuitFile(circuit, BasisInput("0101")))
        assert serialize_circuit(parse_circuit(text)) == text

    def test_product_and_adaptive_files(self, rng):
        program = build_two_round_program(rng, 4, 3)
        doc = CircuitFile(program.register(), build_random_product(rng, 4), program=program)
        text = serialize_circuit(doc)
        again = parse_circuit(text)
        assert again.is_adaptive
        assert len(again.program.rounds) == 3
        assert serialize_circuit(again) == text

    def test_key_order(self):
        data = circuit_file_to_dict(parse_circuit(json.dumps(_doc())))
        assert list(data) == ["n", "pbc", "gates", "input", "measure"]

    def test_matrix_pairs(self):
        assert matrix_to_pairs(np.array([[1j, 2]])) == [[[0.0, 1.0], [2.0, 0.0]]]
