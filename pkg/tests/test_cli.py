import json

import numpy as np
import pytest

from cli import main
from model.circuit import CircuitFile
from model.states import Basis, BasisInput, MeasurementSpec, ProductInput, SingleQubitState

from conftest import build_random_circuit, build_random_product, build_two_round_program, identity_file

FSWAP = {
    "pos": 1,
    "A": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]],
    "B": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]],
}


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def _machine(capsys, *argv):
    code, out, err = _run(capsys, *argv, "--format", "machine")
    assert code == 0, err
    return json.loads(out)


@pytest.fixture(autouse=True)
def _quiet_env(monkeypatch):
    for name in ("MATCHGATE_SIM_THREADS", "MATCHGATE_SIM_LOG_LEVEL", "MATCHGATE_SIM_SHOT_BLOCK"):
        monkeypatch.delenv(name, raising=False)


class TestValidate:
    def test_valid_file(self, capsys, tmp_path):
        path = tmp_path / "fswap.json"
        path.write_text(json.dumps({"n": 2, "gates": [FSWAP], "input": {"type": "basis", "bits": "10"}}))
        report = _machine(capsys, "validate", path)
        assert report["command"] == "validate"
        assert report["results"]["valid"] is True
        assert report["results"]["gates"] == 1
        assert report["input_digest"].startswith("sha256:")

    def test_determinant_mismatch(self, capsys, tmp_path):
        bad = dict(FSWAP, A=[[[1, 0], [0, 0]], [[0, 0], [1, 0]]])
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"n": 2, "gates": [bad], "input": {"type": "basis", "bits": "10"}}))
        code, out, err = _run(capsys, "validate", path)
        assert code == 2
        assert out == ""
        assert "gates[0]" in err

    def test_malformed_number(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"n": 2, "gates": [], "input": {"type": "basis", "bits": "10"}, "pbc": 1e}')
        code, _, err = _run(capsys, "validate", path)
        assert code == 2
        assert err.startswith("error:")

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = _run(capsys, "validate", tmp_path / "nope.json")
        assert code == 2
        assert "cannot read" in err

    def test_usage_errors_exit_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate", "x.json"])
        assert exc.value.code == 2

    def test_adaptive_summary(self, capsys, rng, write_circuit_file):
        program = build_two_round_program(rng, 3, 2)
        path = write_circuit_file(CircuitFile(program.register(), BasisInput("000"), program=program))
        report = _machine(capsys, "validate", path)
        assert report["results"]["rounds"] == 3


class TestProb:
    def test_identity_outcome_equal_to_input(self, capsys, write_circuit_file):
        doc = identity_file(3, BasisInput("101"), MeasurementSpec.computational([1, 2, 3]), "101")
        report = _machine(capsys, "prob", write_circuit_file(doc))
        assert report["results"]["probability"] == pytest.approx(1.0)

    def test_outcome_flag(self, capsys, write_circuit_file):
        path = write_circuit_file(identity_file(3, BasisInput("101")))
        report = _machine(capsys, "prob", path, "--outcome", "1=1,2=0")
        assert report["results"]["probability"] == pytest.approx(1.0)
        assert report["results"]["outcome"] == {"1": 1, "2": 0}

    def test_bitstring_outcome_follows_the_measure_block(self, capsys, write_circuit_file):
        path = write_circuit_file(identity_file(3, BasisInput("101"), MeasurementSpec.computational([3, 2])))
        report = _machine(capsys, "prob", path, "--outcome", "10")
        assert report["results"]["probability"] == pytest.approx(1.0)

    def test_all_over(self, capsys, rng, write_circuit_file):
        doc = CircuitFile(build_random_circuit(rng, 4, 10), BasisInput("0110"))
        report = _machine(capsys, "prob", write_circuit_file(doc), "--all-over", "1,3,4")
        rows = report["results"]["table"]
        assert len(rows) == 8
        assert sum(r["probability"] for r in rows) == pytest.approx(1.0, abs=1e-8)

    def test_product_file_matches_oracle(self, capsys, rng, write_circuit_file):
        doc = CircuitFile(build_random_circuit(rng, 5, 12), build_random_product(rng, 5))
        path = write_circuit_file(doc)
        fast = _machine(capsys, "prob", path, "--all-over", "2,4,5")
        slow = _machine(capsys, "oracle", path, "--all-over", "2,4,5")
        deltas = [abs(a["probability"] - b["probability"]) for a, b in zip(fast["results"]["table"], slow["results"]["table"])]
        assert max(deltas) <= 1e-9

    def test_text_format(self, capsys, write_circuit_file):
        path = write_circuit_file(identity_file(2, BasisInput("01")))
        code, out, _ = _run(capsys, "prob", path, "--outcome", "2=1")
        assert code == 0
        assert "probability: 1.0" in out.splitlines()

    def test_dump_transfer_and_timing(self, capsys, write_circuit_file):
        path = write_circuit_file(identity_file(2, BasisInput("01")))
        report = _machine(capsys, "prob", path, "--outcome", "2=1", "--dump-transfer", "--timing")
        np.testing.assert_allclose(np.array(report["results"]["transfer"])[..., 0], np.eye(4))
        assert report["timing_seconds"] >= 0

    def test_adaptive_trace(self, capsys, rng, write_circuit_file):
        program = build_two_round_program(rng, 3, 3)
        path = write_circuit_file(CircuitFile(program.register(), BasisInput("010"), program=program))
        report = _machine(capsys, "prob", path, "--trace", "0,10")
        assert 0.0 <= report["results"]["probability"] <= 1.0
        code, _, err = _run(capsys, "prob", path)
        assert code == 2
        assert "--trace" in err


class TestExpect:
    def test_plus_state(self, capsys, write_circuit_file):
        spec = ProductInput((SingleQubitState.plus(), SingleQubitState.zero()))
        report = _machine(capsys, "expect", write_circuit_file(identity_file(2, spec)), "--qubit", "1")
        assert report["results"]["expectation_z"] == pytest.approx(0.0, abs=1e-15)
        assert report["results"]["p0"] == pytest.approx(0.5)

    def test_all_zero_input(self, capsys, write_circuit_file):
        path = write_circuit_file(identity_file(3, BasisInput("000")))
        for k in (1, 2, 3):
            assert _machine(capsys, "expect", path, "--qubit", k)["results"]["expectation_z"] == pytest.approx(1.0)


class TestSample:
    def test_identity_basis_input(self, capsys, write_circuit_file):
        path = write_circuit_file(identity_file(3, BasisInput("110"), MeasurementSpec.computational([1, 2, 3])))
        report = _machine(capsys, "sample", path, "--shots", 50, "--seed", 1)
        assert report["results"]["counts"] == [{"outcome": "110", "count": 50, "frequency": 1.0}]

    def test_fixed_seed_gives_identical_bytes(self, capsys, rng, write_circuit_file):
        doc = CircuitFile(build_random_circuit(rng, 4, 10), BasisInput("1000"), MeasurementSpec.computational([1, 2]))
        path = write_circuit_file(doc)
        first = _run(capsys, "sample", path, "--shots", 300, "--seed", 99, "--emit-shots")
        second = _run(capsys, "sample", path, "--shots", 300, "--seed", 99, "--emit-shots")
        assert first == second
        assert first[0] == 0

    def test_absent_seed_is_reported(self, capsys, write_circuit_file):
        path = write_circuit_file(identity_file(2, BasisInput("10")))
        report = _machine(capsys, "sample", path, "--qubits", "1", "--shots", 5)
        assert isinstance(report["seed"], int)

    def test_rotated_measure_block(self, capsys, write_circuit_file):
        spec = ProductInput((SingleQubitState.plus(), SingleQubitState.zero()))
        measure = MeasurementSpec((1,), (Basis(float(np.pi / 2), 0.0),))
        report = _machine(capsys, "sample", write_circuit_file(identity_file(2, spec, measure)), "--shots", 40, "--seed", 3)
        assert report["results"]["counts"] == [{"outcome": "0", "count": 40, "frequency": 1.0}]

    def test_adaptive_program(self, capsys, rng, write_circuit_file):
        program = build_two_round_program(rng, 3, 3)
        path = write_circuit_file(CircuitFile(program.register(), BasisInput("011"), program=program))
        report = _machine(capsys, "sample", path, "--shots", 100, "--seed", 5)
        assert sum(r["count"] for r in report["results"]["counts"]) == 100
        assert report["results"]["final_distributions"]

    def test_shots_must_be_positive(self, capsys, write_circuit_file):
        path = write_circuit_file(identity_file(2, BasisInput("10")))
        code, _, _ = _run(capsys, "sample", path, "--qubits", "1", "--shots", 0)
        assert code == 2


class TestOracle:
    def test_compare_on_identity(self, capsys, write_circuit_file):
        path = write_circuit_file(identity_file(3, BasisInput("011"), MeasurementSpec.computational([1, 2, 3])))
        report = _machine(capsys, "oracle", path, "--compare")
        assert report["results"]["max_deviation"] == pytest.approx(0.0, abs=1e-15)

    def test_compare_on_random_file(self, capsys, rng, write_circuit_file):
        doc = CircuitFile(build_random_circuit(rng, 6, 20), BasisInput("010011"), MeasurementSpec.computational([1, 2, 3, 4, 5, 6]))
        report = _machine(capsys, "oracle", write_circuit_file(doc), "--compare")
        assert report["results"]["max_deviation"] <= 1e-9

    def test_compare_expectation(self, capsys, rng, write_circuit_file):
        doc = CircuitFile(build_random_circuit(rng, 4, 8), build_random_product(rng, 4))
        report = _machine(capsys, "oracle", write_circuit_file(doc), "--qubit", 3, "--compare")
        assert report["results"]["max_deviation"] <= 1e-9

    def test_compare_adaptive(self, capsys, rng, write_circuit_file):
        program = build_two_round_program(rng, 4, 4)
        path = write_circuit_file(CircuitFile(program.register(), BasisInput("1001"), program=program))
        report = _machine(capsys, "oracle", path, "--compare")
        assert report["results"]["max_deviation"] <= 1e-9

    def test_dimension_guard(self, capsys, write_circuit_file):
        path = write_circuit_file(identity_file(15, BasisInput("0" * 15)))
        code, out, err = _run(capsys, "oracle", path, "--outcome", "1=0")
        assert code == 2
        assert out == ""
        assert "dense oracle refuses 15 qubits" in err

    @pytest.mark.parametrize("flags", [("--all-over", "1,7"), ("--all-over", "2,2"), ("--qubit", "0"), ("--outcome", "4=1")])
    def test_qubits_outside_the_register(self, capsys, write_circuit_file, flags):
        path = write_circuit_file(identity_file(3, BasisInput("010")))
        code, out, err = _run(capsys, "oracle", path, *flags)
        assert code == 2
        assert out == ""
        assert err.startswith("error:")


class TestArguments:
    def test_negative_seed(self, capsys, write_circuit_file):
        path = write_circuit_file(identity_file(2, BasisInput("10")))
        code, out, err = _run(capsys, "sample", path, "--qubits", "1", "--seed", -1)
        assert code == 2
        assert out == ""
        assert "--seed" in err

    def test_report_echoes_the_command_line(self, capsys, write_circuit_file):
        path = write_circuit_file(identity_file(2, BasisInput("10")))
        report = _machine(capsys, "sample", path, "--qubits", "1", "--shots", 3, "--seed", 4)
        assert report["argv"] == ["sample", str(path), "--qubits", "1", "--shots", "3", "--seed", "4", "--format", "machine"]

    def test_settings_warnings_use_the_log_format(self, capsys, monkeypatch, write_circuit_file):
        monkeypatch.setenv("MATCHGATE_SIM_SHOT_BLOCK", "lots")
        path = write_circuit_file(identity_file(2, BasisInput("10")))
        code, _, err = _run(capsys, "validate", path)
        assert code == 0
        assert "WARNING cli.settings: MATCHGATE_SIM_SHOT_BLOCK" in err
