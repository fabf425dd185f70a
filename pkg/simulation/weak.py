"""Chain-rule sampling on top of the exact nested-projector probabilities.

A shot walks a prefix tree: every node holds the cumulative transfer, the stages
fixed so far and the prefix probability.  A planner decides, from the prefix
alone, which mode is measured next and which gates run before and after that
measurement.  Nodes are memoized, so repeated prefixes cost nothing.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from errors import DegenerateConditional, ProbabilityOutOfRange, SchemaError
from fermions.transfer import ModePermutation, ModeTransfer, compose_transfer, permute_modes
from model.circuit import AdaptiveProgram, Circuit, GateApplication
from model.gates import fswap
from model.states import Basis, InputSpec, MeasurementSpec, OutcomeAssignment
from simulation.preparation import euler_single_qubit, step_gates
from simulation.registers import Register, build_register
from simulation.rng import shot_blocks
from simulation.strong import (
    DEGENERATE_TOL,
    ProjectorString,
    Stage,
    compile_circuit,
    final_round_distribution,
    round_stage_transfer,
    stage_probability,
)


logger = logging.getLogger(__name__)

PAIR_TOL = 1e-9


@dataclass(frozen=True)
class PlannedStep:
    """Cumulative transfer at the moment `mode` is measured."""

    transfer: ModeTransfer
    mode: int


@dataclass
class SamplerState:
    transfer: ModeTransfer
    stages: Tuple[Stage, ...]
    probability: float
    step: Optional[PlannedStep] = None
    children: Dict[int, "SamplerState"] = field(default_factory=dict)
    expanded: bool = False


class Planner:
    """Measurement schedule; subclasses decide from the prefix bits alone."""

    max_steps: int = 0

    def plan(self, prefix: str, state: SamplerState) -> Optional[PlannedStep]:
        raise NotImplementedError

    def after(self, prefix: str, step: PlannedStep, bit: int) -> ModeTransfer:
        return step.transfer


class PrefixSampler:
    def __init__(self, register: Register, root: ModeTransfer, planner: Planner):
        self.register = register
        self.planner = planner
        self.root = SamplerState(root, (), 1.0)

    def _expand(self, state: SamplerState, prefix: str) -> None:
        if state.probability < DEGENERATE_TOL:
            raise DegenerateConditional(prefix, state.probability)
        step = state.step
        for bit in (0, 1):
            stage = Stage(step.transfer, ProjectorString(((step.mode, bit),)))
            stages = state.stages + (stage,)
            p = stage_probability(self.register, stages, f"prefix {prefix}{bit}")
            transfer = self.planner.after(prefix + str(bit), step, bit)
            state.children[bit] = SamplerState(transfer, stages, p)
        total = state.children[0].probability + state.children[1].probability
        if abs(total - state.probability) > PAIR_TOL:
            raise ProbabilityOutOfRange(total / state.probability, f"conditional pair after prefix {prefix!r}")
        state.expanded = True
        logger.debug(f"expanded prefix {prefix!r}: p={state.probability:.6g}")

    def conditional_one(self, state: SamplerState, prefix: str) -> float:
        if not state.expanded:
            self._expand(state, prefix)
        p0, p1 = state.children[0].probability, state.children[1].probability
        return p1 / (p0 + p1)

    def draw(self, uniforms: np.ndarray) -> str:
        state, prefix = self.root, ""
        for u in uniforms:
            if state.step is None and not state.expanded:
                state.step = self.planner.plan(prefix, state)
            if state.step is None:
                break
            bit = 1 if u < self.conditional_one(state, prefix) else 0
            state = state.children[bit]
            prefix += str(bit)
        return prefix

    def run(self, seed: int, shots: int, block_size: Optional[int] = None) -> List[str]:
        out: List[str] = []
        width = max(self.planner.max_steps, 1)
        for block in shot_blocks(seed, shots, block_size):
            uniforms = block.rng.random((block.count, width))
            out.extend(self.draw(row) for row in uniforms)
        return out


# -----------------------------
# Computational-basis subsets
# -----------------------------


class FixedModes(Planner):
    def __init__(self, modes: Sequence[int]):
        self.modes = tuple(modes)
        self.max_steps = len(self.modes)

    def plan(self, prefix: str, state: SamplerState) -> Optional[PlannedStep]:
        j = len(prefix)
        return PlannedStep(state.transfer, self.modes[j]) if j < len(self.modes) else None


def _checked_subset(qubits: Sequence[int], n: int) -> MeasurementSpec:
    spec = MeasurementSpec.computational(qubits)
    if spec.size == 0:
        raise SchemaError("sampling needs at least one measured qubit", field="measure")
    for q in spec.qubits:
        if not 1 <= q <= n:
            raise SchemaError(f"qubit {q} outside 1..{n}", field="measure")
    return spec


def sample_computational(
    circuit: Circuit,
    spec: InputSpec,
    subset: Sequence[int],
    seed: int,
    shots: int,
    block_size: Optional[int] = None,
) -> List[str]:
    """Bitstrings over `subset` in listed order."""
    _checked_subset(subset, circuit.n)
    compiled = compile_circuit(circuit, spec)
    sampler = PrefixSampler(compiled.register, compiled.transfer, FixedModes([q - 1 for q in subset]))
    return sampler.run(seed, shots, block_size)


# -----------------------------
# Rotated bases
# -----------------------------


class _RotatedPlan(Planner):
    """Discard measurements, relabeling, then the catalyst loop from the last measured slot down.

    Unmeasured qubits above the lowest measured one are read out first and
    forgotten; their parity fixes the Jordan–Wigner sign of each rotated qubit.
    """

    def __init__(self, n: int, measurement: MeasurementSpec):
        self.n = n
        measured = sorted(measurement.qubits)
        lowest = measured[0]
        self.discard = tuple(q for q in range(lowest + 1, n + 1) if q not in measurement.qubits)
        self.measured = tuple(measured)
        self.bases: Dict[int, Basis] = dict(zip(measurement.qubits, measurement.bases))
        unmeasured = [q for q in range(1, n + 1) if q not in measurement.qubits]
        self.permutation = ModePermutation.from_order([q - 1 for q in unmeasured + measured] + [n])
        self.max_steps = len(self.discard) + len(self.measured)

    def _slot(self, i_rev: int) -> Tuple[int, int]:
        idx = len(self.measured) - 1 - i_rev
        return idx, self.n - len(self.measured) + idx

    def _basis_for(self, qubit: int, prefix: str) -> Basis:
        discarded = prefix[: len(self.discard)]
        flips = sum(int(b) for q, b in zip(self.discard, discarded) if q > qubit)
        basis = self.bases[qubit]
        return basis.flipped_azimuth() if flips % 2 else basis

    def plan(self, prefix: str, state: SamplerState) -> Optional[PlannedStep]:
        j = len(prefix)
        if j < len(self.discard):
            return PlannedStep(state.transfer, self.discard[j] - 1)
        i_rev = j - len(self.discard)
        if i_rev >= len(self.measured):
            return None
        transfer = state.transfer
        if i_rev == 0:
            transfer = permute_modes(transfer, self.permutation)
        idx, slot = self._slot(i_rev)
        basis = self._basis_for(self.measured[idx], prefix)
        undo = [step.inverse() for step in reversed(euler_single_qubit(basis.state()))]
        if undo:
            gadget = Circuit(self.n + 1, tuple(step_gates(undo, slot + 1)))
            transfer = compose_transfer(gadget, start=transfer)
        return PlannedStep(transfer, slot)

    def after(self, prefix: str, step: PlannedStep, bit: int) -> ModeTransfer:
        if len(prefix) <= len(self.discard):
            return step.transfer
        swap = Circuit(self.n + 1, (GateApplication(fswap(conditioned_on_one=bool(bit)), step.mode + 1),))
        return compose_transfer(swap, start=step.transfer)

    def outcome(self, prefix: str, order: Sequence[int]) -> str:
        rotated = prefix[len(self.discard) :]
        by_qubit = {self.measured[len(self.measured) - 1 - i]: b for i, b in enumerate(rotated)}
        return "".join(by_qubit[q] for q in order)


def sample_rotated(
    circuit: Circuit,
    spec: InputSpec,
    measurement: MeasurementSpec,
    seed: int,
    shots: int,
    block_size: Optional[int] = None,
) -> List[str]:
    """Bitstrings in the order of measurement.qubits, each qubit read in its own basis."""
    _checked_subset(measurement.qubits, circuit.n)
    compiled = compile_circuit(circuit, spec, catalyst=True)
    plan = _RotatedPlan(circuit.n, measurement)
    sampler = PrefixSampler(compiled.register, compiled.transfer, plan)
    logger.info(f"rotated sampling: measured={list(measurement.qubits)}, discarded={list(plan.discard)}")
    return [plan.outcome(prefix, measurement.qubits) for prefix in sampler.run(seed, shots, block_size)]


# -----------------------------
# Adaptive programs
# -----------------------------


class _AdaptivePlan(Planner):
    def __init__(self, program: AdaptiveProgram, spec: InputSpec):
        self.program = program
        self.spec = spec
        self.max_steps = program.max_measured_bits

    def split(self, prefix: str) -> Tuple[List[Tuple[int, str]], Optional[int], int]:
        """Completed (round, bits) pairs, the current round and bits consumed in it."""
        done: List[Tuple[int, str]] = []
        index: Optional[int] = 0
        pos = 0
        while index is not None:
            k = self.program.rounds[index].measure.size
            if len(prefix) - pos < k:
                return done, index, len(prefix) - pos
            bits = prefix[pos : pos + k]
            done.append((index, bits))
            pos += k
            index = self.program.rounds[index].next_round(bits)
        return done, None, 0

    def plan(self, prefix: str, state: SamplerState) -> Optional[PlannedStep]:
        _, index, j = self.split(prefix)
        if index is None:
            return None
        transfer = state.transfer
        if j == 0:
            transfer = round_stage_transfer(self.program, index, self.spec, transfer)
        return PlannedStep(transfer, self.program.rounds[index].measure.qubits[j] - 1)


@dataclass(frozen=True)
class AdaptiveShot:
    trace: Tuple[Tuple[int, str], ...]
    final: Tuple[int, str]


@dataclass(frozen=True)
class AdaptiveRun:
    shots: Tuple[AdaptiveShot, ...]
    final_distributions: Dict[Tuple[Tuple[int, str], ...], Dict[str, float]]


def run_adaptive(
    program: AdaptiveProgram,
    spec: InputSpec,
    seed: int,
    shots: int,
    block_size: Optional[int] = None,
) -> AdaptiveRun:
    """Sample round by round; the terminal round's exact distribution is reported per realized trace."""
    if spec.n != program.n:
        raise SchemaError(f"input has {spec.n} qubits, program has {program.n}", field="input")
    register = build_register(spec)
    plan = _AdaptivePlan(program, spec)
    sampler = PrefixSampler(register, register.start, plan)

    results: List[AdaptiveShot] = []
    distributions: Dict[Tuple[Tuple[int, str], ...], Dict[str, float]] = {}
    for prefix in sampler.run(seed, shots, block_size):
        rounds, _, _ = plan.split(prefix)
        trace, final = tuple(rounds[:-1]), rounds[-1]
        results.append(AdaptiveShot(trace, final))
        if trace not in distributions:
            assignments = [
                OutcomeAssignment.from_bits(program.rounds[idx].measure.qubits, bits) for idx, bits in trace
            ]
            distributions[trace] = final_round_distribution(program, spec, assignments)
    logger.info(f"adaptive run: shots={shots}, distinct traces={len(distributions)}")
    return AdaptiveRun(tuple(results), distributions)


# -----------------------------
# Empirical statistics
# -----------------------------


def empirical_distribution(samples: Sequence[str]) -> pd.Series:
    """Relative frequencies indexed by outcome, sorted lexicographically."""
    counts = pd.Series(list(samples), dtype=object).value_counts()
    return (counts / max(len(samples), 1)).sort_index()


def total_variation(p: Dict[str, float], q: Dict[str, float]) -> float:
    keys = set(p) | set(q)
    return 0.5 * float(sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys))
