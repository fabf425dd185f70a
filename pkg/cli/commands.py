"""Command-line front end: validate, prob, expect, sample, oracle."""

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from cli.logs import configure_logging
from cli.settings import Settings, load_settings
from data.circuit_file import matrix_to_pairs, parse_circuit
from data.reports import RunReport, input_digest
from errors import InputError, MatchgateSimError, SchemaError
from model.circuit import CircuitFile
from model.states import BasisInput, MeasurementSpec, OutcomeAssignment
from oracle import statevector as dense
from simulation.rng import fresh_seed
from simulation.strong import (
    MAX_TABLE_QUBITS,
    adaptive_joint_prob,
    compile_circuit,
    expectation_z,
    outcome_table,
    probability,
)
from simulation.weak import empirical_distribution, run_adaptive, sample_computational, sample_rotated


logger = logging.getLogger(__name__)

DEFAULT_SHOTS = 1000


# -----------------------------
# Argument helpers
# -----------------------------


def _qubit_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise SchemaError(f"expected comma-separated qubit indices, got {text!r}", field="qubits") from None


def parse_outcome(text: str, doc: CircuitFile) -> OutcomeAssignment:
    """`q=b,q=b` pairs, or a bitstring aligned with the file's measure block."""
    if "=" in text:
        bits: Dict[int, int] = {}
        for part in text.split(","):
            q, _, b = part.partition("=")
            try:
                bits[int(q)] = int(b)
            except ValueError:
                raise SchemaError(f"cannot read outcome entry {part!r}", field="outcome") from None
        bases = dict(zip(doc.measure.qubits, doc.measure.bases)) if doc.measure is not None else {}
        assignment = OutcomeAssignment.of(bits, bases)
    else:
        if doc.measure is None:
            raise SchemaError("a bare bitstring outcome needs a measure block in the file", field="outcome")
        assignment = doc.measure.assign(text.strip())
    assignment.check_range(doc.circuit.n)
    return assignment


def _trace(text: str, doc: CircuitFile) -> List[OutcomeAssignment]:
    """Comma-separated bitstrings, one per visited round."""
    program = doc.program
    out: List[OutcomeAssignment] = []
    index: Optional[int] = 0
    for step, bits in enumerate(part.strip() for part in text.split(",")):
        if index is None:
            raise SchemaError(f"trace entry {step} comes after the program stopped", field="trace")
        out.append(program.rounds[index].measure.assign(bits))
        index = program.rounds[index].next_round(bits)
    return out


def _read(path: str) -> Tuple[bytes, CircuitFile]:
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}", {"file": path}) from e
    return raw, parse_circuit(raw)


def _subset(args: argparse.Namespace, doc: CircuitFile) -> Optional[List[int]]:
    if getattr(args, "all_over", None):
        return _qubit_list(args.all_over)
    return None


def _assignments(args: argparse.Namespace, doc: CircuitFile) -> List[OutcomeAssignment]:
    if getattr(args, "outcome", None):
        return [parse_outcome(args.outcome, doc)]
    return doc.assignments()


def _default_table_qubits(doc: CircuitFile, rotated_ok: bool = False) -> List[int]:
    if doc.measure is None:
        raise SchemaError("give --outcome or --all-over, or a measure block in the file", field="measure")
    if not rotated_ok and not doc.measure.all_computational:
        raise SchemaError("exact tables cover computational-basis measure blocks only", field="measure")
    return list(doc.measure.qubits)


# -----------------------------
# Commands
# -----------------------------


def cmd_validate(args: argparse.Namespace, settings: Settings) -> RunReport:
    raw, doc = _read(args.file)
    report = RunReport("validate", args.file, input_digest(raw))
    report.results.update(
        {
            "valid": True,
            "n": doc.circuit.n,
            "pbc": doc.program.pbc if doc.program is not None else doc.circuit.pbc,
            "input": "basis" if isinstance(doc.input, BasisInput) else "product",
        }
    )
    if doc.program is not None:
        report.results["rounds"] = len(doc.program.rounds)
        report.results["gates"] = sum(r.segment.gate_count for r in doc.program.rounds)
        report.results["wrap_gates"] = sum(
            sum(1 for app in r.segment.gates if app.wrap) for r in doc.program.rounds
        )
    else:
        report.results["gates"] = doc.circuit.gate_count
        report.results["wrap_gates"] = sum(1 for app in doc.circuit.gates if app.wrap)
        if doc.measure is not None:
            report.results["measured"] = list(doc.measure.qubits)
    return report


def cmd_prob(args: argparse.Namespace, settings: Settings) -> RunReport:
    raw, doc = _read(args.file)
    report = RunReport("prob", args.file, input_digest(raw))
    if doc.program is not None:
        if not args.trace:
            raise SchemaError("adaptive files need --trace with one bitstring per round", field="trace")
        trace = _trace(args.trace, doc)
        report.results["trace"] = [a.bitstring for a in trace]
        report.results["probability"] = adaptive_joint_prob(doc.program, doc.input, trace)
        return report

    compiled = compile_circuit(doc.circuit, doc.input)
    if args.dump_transfer:
        report.results["transfer"] = matrix_to_pairs(compiled.circuit_transfer.majorana)
    subset = _subset(args, doc)
    assignments = [] if subset else _assignments(args, doc)
    if subset or not assignments:
        qubits = subset or _default_table_qubits(doc)
        table = outcome_table(compiled, qubits, settings.threads)
        report.results["qubits"] = qubits
        report.tables["table"] = table
        report.results["sum"] = float(table["probability"].sum())
        return report
    for assignment in assignments:
        report.results["outcome"] = {str(e.qubit): e.bit for e in assignment.entries}
        report.results["probability"] = probability(compiled, assignment)
    return report


def cmd_expect(args: argparse.Namespace, settings: Settings) -> RunReport:
    raw, doc = _read(args.file)
    if doc.program is not None:
        raise SchemaError("expectation values are defined for non-adaptive files", field="rounds")
    report = RunReport("expect", args.file, input_digest(raw))
    z = expectation_z(doc.circuit, doc.input, args.qubit)
    report.results.update({"qubit": args.qubit, "expectation_z": z, "p0": (1.0 + z) / 2.0, "p1": (1.0 - z) / 2.0})
    return report


def _counts(samples: Sequence[str]) -> pd.DataFrame:
    freq = empirical_distribution(samples)
    counts = pd.Series(list(samples), dtype=object).value_counts().reindex(freq.index)
    return pd.DataFrame({"outcome": list(freq.index), "count": [int(c) for c in counts], "frequency": list(freq)})


def cmd_sample(args: argparse.Namespace, settings: Settings) -> RunReport:
    raw, doc = _read(args.file)
    seed = args.seed
    if seed is None:
        seed = fresh_seed()
        logger.info(f"no --seed given; drew seed {seed}")
    report = RunReport("sample", args.file, input_digest(raw), seed=seed)
    report.results["shots"] = args.shots

    if doc.program is not None:
        run = run_adaptive(doc.program, doc.input, seed, args.shots, settings.shot_block)
        keys = [" ".join(bits for _, bits in shot.trace + (shot.final,)) for shot in run.shots]
        report.tables["counts"] = _counts(keys)
        report.results["final_distributions"] = {
            " ".join(bits for _, bits in trace) or "-": dist for trace, dist in run.final_distributions.items()
        }
        if args.emit_shots:
            report.results["samples"] = keys
        return report

    if args.qubits:
        measurement = MeasurementSpec.computational(_qubit_list(args.qubits))
    elif doc.measure is not None:
        measurement = doc.measure
    else:
        raise SchemaError("give --qubits or a measure block in the file", field="measure")
    report.results["qubits"] = list(measurement.qubits)
    if measurement.all_computational:
        samples = sample_computational(
            doc.circuit, doc.input, measurement.qubits, seed, args.shots, settings.shot_block
        )
    else:
        samples = sample_rotated(doc.circuit, doc.input, measurement, seed, args.shots, settings.shot_block)
    report.tables["counts"] = _counts(samples)
    if args.emit_shots:
        report.results["samples"] = samples
    return report


def _oracle_table(doc: CircuitFile, qubits: Sequence[int]) -> pd.DataFrame:
    sv = dense.circuit_state(doc.circuit, doc.input)
    bases = None
    if doc.measure is not None and list(doc.measure.qubits) == list(qubits):
        bases = list(doc.measure.bases)
    table = dense.exact_distribution(sv, qubits, bases)
    return pd.DataFrame({"outcome": list(table), "probability": list(table.values())})


def cmd_oracle(args: argparse.Namespace, settings: Settings) -> RunReport:
    raw, doc = _read(args.file)
    dense.check_size(doc.circuit.n, dense.qubit_limit(doc.input))
    report = RunReport("oracle", args.file, input_digest(raw))

    if doc.program is not None:
        traces = dense.trace_distribution(doc.program, doc.input)
        frame = pd.DataFrame(
            {"trace": [" ".join(t) for t in traces], "probability": list(traces.values())}
        )
        report.tables["traces"] = frame
        if args.compare:
            deviations = []
            for trace, p in traces.items():
                assignments = _trace(",".join(trace), doc)
                deviations.append(abs(adaptive_joint_prob(doc.program, doc.input, assignments) - p))
            report.results["max_deviation"] = max(deviations, default=0.0)
        return report

    if args.qubit is not None:
        z = dense.expectation_z(dense.circuit_state(doc.circuit, doc.input), args.qubit)
        report.results.update({"qubit": args.qubit, "expectation_z": z})
        if args.compare:
            report.results["max_deviation"] = abs(expectation_z(doc.circuit, doc.input, args.qubit) - z)
        return report

    subset = _subset(args, doc)
    assignments = [] if subset else _assignments(args, doc)
    if assignments:
        sv = dense.circuit_state(doc.circuit, doc.input)
        assignment = assignments[0]
        p = dense.assignment_probability(sv, assignment)
        report.results["outcome"] = {str(e.qubit): e.bit for e in assignment.entries}
        report.results["probability"] = p
        if args.compare:
            compiled = compile_circuit(doc.circuit, doc.input)
            report.results["max_deviation"] = abs(probability(compiled, assignment) - p)
        return report

    qubits = subset or _default_table_qubits(doc, rotated_ok=not args.compare)
    if len(qubits) > MAX_TABLE_QUBITS:
        raise SchemaError(f"tables cover at most {MAX_TABLE_QUBITS} qubits", field="all-over")
    table = _oracle_table(doc, qubits)
    report.tables["table"] = table
    report.results["qubits"] = list(qubits)
    report.results["sum"] = float(table["probability"].sum())
    if args.compare:
        compiled = compile_circuit(doc.circuit, doc.input)
        fast = outcome_table(compiled, qubits, settings.threads)
        report.results["max_deviation"] = float((fast["probability"] - table["probability"]).abs().max())
    return report


COMMANDS = {
    "validate": cmd_validate,
    "prob": cmd_prob,
    "expect": cmd_expect,
    "sample": cmd_sample,
    "oracle": cmd_oracle,
}


# -----------------------------
# Entry point
# -----------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="matchgate-sim", description="Matchgate circuit simulator")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="circuit file (JSON)")
    common.add_argument("--format", choices=("text", "machine"), default="text")
    common.add_argument("--verbose", action="store_true", help="log progress to stderr")
    common.add_argument("--timing", action="store_true", help="add wall time to the report")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check a circuit file")

    prob = sub.add_parser("prob", parents=[common], help="exact outcome probabilities")
    prob.add_argument("--outcome", help="q=b,q=b pairs or a bitstring aligned with the measure block")
    prob.add_argument("--all-over", dest="all_over", help="comma-separated qubits for a full table")
    prob.add_argument("--trace", help="adaptive files: one bitstring per visited round, comma-separated")
    prob.add_argument("--dump-transfer", dest="dump_transfer", action="store_true")

    expect = sub.add_parser("expect", parents=[common], help="<Z_k> after the circuit")
    expect.add_argument("--qubit", type=int, required=True)

    sample = sub.add_parser("sample", parents=[common], help="draw measurement samples")
    sample.add_argument("--shots", type=int, default=DEFAULT_SHOTS)
    sample.add_argument("--seed", type=int)
    sample.add_argument("--qubits", help="comma-separated qubits, overriding the measure block")
    sample.add_argument("--emit-shots", dest="emit_shots", action="store_true", help="list every sample")

    oracle = sub.add_parser("oracle", parents=[common], help="dense state-vector reference")
    oracle.add_argument("--outcome")
    oracle.add_argument("--all-over", dest="all_over")
    oracle.add_argument("--qubit", type=int)
    oracle.add_argument("--compare", action="store_true", help="also run the fast path and report max |delta|")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    configure_logging(verbose=args.verbose)
    settings = load_settings()
    configure_logging(settings.log_level, args.verbose)
    if getattr(args, "shots", 1) < 1:
        print("error: --shots must be at least 1", file=sys.stderr)
        return 2
    if (getattr(args, "seed", None) or 0) < 0:
        print("error: --seed must be non-negative", file=sys.stderr)
        return 2

    started = time.perf_counter()
    try:
        report = COMMANDS[args.command](args, settings)
    except MatchgateSimError as e:
        print(f"error: {e.message}", file=sys.stderr)
        if e.details:
            print(json.dumps(e.details, default=str), file=sys.stderr)
        return e.exit_code
    report.argv = argv
    if args.timing:
        report.timing = time.perf_counter() - started
    logger.info(f"{args.command} finished in {time.perf_counter() - started:.3f} s")
    sys.stdout.write(report.render(args.format))
    return 0
