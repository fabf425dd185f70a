import json
import logging
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, StrictBool, StrictFloat, StrictInt, StrictStr, model_validator
from pydantic import ValidationError as PydanticValidationError

from errors import MatchgateValidationError, SchemaError
from model.circuit import AdaptiveProgram, Circuit, CircuitFile, GateApplication, Round
from model.gates import Matchgate, validate_matchgate
from model.states import (
    COMPUTATIONAL,
    Basis,
    BasisInput,
    InputSpec,
    MeasurementSpec,
    ProductInput,
    SingleQubitState,
)


logger = logging.getLogger(__name__)

Number = Union[StrictInt, StrictFloat]
ComplexPair = Annotated[List[Number], Field(min_length=2, max_length=2)]
MatrixRow = Annotated[List[ComplexPair], Field(min_length=2, max_length=2)]
Matrix2 = Annotated[List[MatrixRow], Field(min_length=2, max_length=2)]


# -----------------------------
# Schema models
# -----------------------------


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GateModel(_Strict):
    pos: StrictInt
    pbc: StrictBool = False
    A: Matrix2
    B: Matrix2


class AnglesModel(_Strict):
    theta: Number
    phi: Number = 0.0


class BasisInputModel(_Strict):
    type: Literal["basis"]
    bits: StrictStr


class ProductInputModel(_Strict):
    type: Literal["product"]
    qubits: List[AnglesModel] = Field(min_length=1)


InputModel = Annotated[Union[BasisInputModel, ProductInputModel], Field(discriminator="type")]


class MeasureModel(_Strict):
    qubit: StrictInt
    basis: Union[Literal["Z"], AnglesModel] = "Z"
    bit: Optional[StrictInt] = None


class RoundModel(_Strict):
    gates: List[GateModel] = Field(default_factory=list)
    measure: List[MeasureModel] = Field(min_length=1)
    branches: Dict[str, Optional[StrictInt]] = Field(default_factory=dict)


class CircuitFileModel(_Strict):
    n: StrictInt
    pbc: StrictBool = False
    gates: Optional[List[GateModel]] = None
    rounds: Optional[List[RoundModel]] = None
    input: InputModel
    measure: Optional[List[MeasureModel]] = None

    @model_validator(mode="after")
    def _one_body(self) -> "CircuitFileModel":
        if self.rounds is not None and (self.gates is not None or self.measure is not None):
            raise ValueError("an adaptive file carries 'rounds' instead of top-level 'gates'/'measure'")
        return self


# -----------------------------
# Utilities
# -----------------------------


def _loc_to_path(loc: Tuple[Any, ...]) -> str:
    path = ""
    for part in loc:
        if isinstance(part, int):
            path += f"[{part}]"
        elif part in ("BasisInputModel", "ProductInputModel", "basis", "product") and path.endswith("input"):
            continue
        else:
            path += f".{part}" if path else str(part)
    return path


def _load_json(text: Union[str, bytes]) -> Any:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise SchemaError(f"file is not UTF-8 ({e.reason})") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(e.msg, line=e.lineno, column=e.colno) from e


def _dump_json(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def _matrix_from_pairs(rows: List[List[List[float]]]) -> np.ndarray:
    return np.array([[complex(float(re), float(im)) for re, im in row] for row in rows], dtype=complex)


def matrix_to_pairs(m: np.ndarray) -> List[List[List[float]]]:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def _with_field(err: MatchgateValidationError, path: str) -> MatchgateValidationError:
    err.details["field"] = path
    err.message = f"field {path}: {err.message}"
    err.args = (err.message,)
    return err


def _angle(value: float, path: str, upper: float, closed: bool) -> float:
    value = float(value)
    ok = 0.0 <= value <= upper if closed else 0.0 <= value < upper
    if not ok:
        bracket = "]" if closed else ")"
        raise SchemaError(f"angle {value!r} outside [0, {upper:.6g}{bracket}", field=path)
    return value


# -----------------------------
# Model -> domain
# -----------------------------


def _gate(model: GateModel, path: str) -> Tuple[Matchgate, bool]:
    try:
        gate = validate_matchgate(_matrix_from_pairs(model.A), _matrix_from_pairs(model.B))
    except MatchgateValidationError as e:
        raise _with_field(e, path) from None
    return gate, model.pbc


def _circuit(n: int, pbc: bool, gates: List[GateModel], prefix: str) -> Circuit:
    apps = []
    for idx, g in enumerate(gates):
        gate, wrap = _gate(g, f"{prefix}[{idx}]")
        apps.append(GateApplication(gate, g.pos, wrap))
    try:
        return Circuit(n, tuple(apps), pbc)
    except SchemaError as e:
        if prefix == "gates" or not e.field:
            raise
        raise SchemaError(e.message.split(": ", 1)[-1], field=prefix + e.field[len("gates"):]) from None


def _input(model: Union[BasisInputModel, ProductInputModel], n: int) -> InputSpec:
    if isinstance(model, BasisInputModel):
        spec: InputSpec = BasisInput(model.bits)
    else:
        qubits = []
        for idx, q in enumerate(model.qubits):
            path = f"input.qubits[{idx}]"
            theta = _angle(q.theta, f"{path}.theta", float(np.pi), closed=True)
            phi = _angle(q.phi, f"{path}.phi", float(2 * np.pi), closed=False)
            qubits.append(SingleQubitState(theta, phi))
        spec = ProductInput(tuple(qubits))
    if spec.n != n:
        raise SchemaError(f"input has {spec.n} qubits, circuit has {n}", field="input")
    return spec


def _measure(entries: List[MeasureModel], n: int, prefix: str) -> Tuple[MeasurementSpec, Optional[str]]:
    qubits, bases, bits = [], [], []
    for idx, m in enumerate(entries):
        path = f"{prefix}[{idx}]"
        if not 1 <= m.qubit <= n:
            raise SchemaError(f"qubit {m.qubit} outside 1..{n}", field=f"{path}.qubit")
        if m.basis == "Z":
            basis = COMPUTATIONAL
        else:
            basis = Basis(
                _angle(m.basis.theta, f"{path}.basis.theta", float(np.pi), closed=True),
                _angle(m.basis.phi, f"{path}.basis.phi", float(2 * np.pi), closed=False),
            )
        if m.bit is not None and m.bit not in (0, 1):
            raise SchemaError(f"bit must be 0 or 1, got {m.bit}", field=f"{path}.bit")
        qubits.append(m.qubit)
        bases.append(basis)
        bits.append(m.bit)
    spec = MeasurementSpec(tuple(qubits), tuple(bases))
    if all(b is not None for b in bits):
        return spec, "".join(str(b) for b in bits)
    if any(b is not None for b in bits):
        raise SchemaError("either every measure entry carries a bit or none does", field=prefix)
    return spec, None


def parse_circuit(text: Union[str, bytes]) -> CircuitFile:
    raw = _load_json(text)
    try:
        model = CircuitFileModel.model_validate(raw)
    except PydanticValidationError as e:
        first = e.errors()[0]
        path = _loc_to_path(tuple(first.get("loc", ())))
        raise SchemaError(first.get("msg", "invalid value"), field=path or None, errors=len(e.errors())) from None

    n = model.n
    if n < 2:
        raise SchemaError(f"a circuit needs at least 2 qubits, got n={n}", field="n")
    spec_input = _input(model.input, n)

    if model.rounds is not None:
        rounds = []
        for r_idx, r in enumerate(model.rounds):
            prefix = f"rounds[{r_idx}]"
            segment = _circuit(n, model.pbc, r.gates, f"{prefix}.gates")
            measure, bits = _measure(r.measure, n, f"{prefix}.measure")
            if bits is not None:
                raise SchemaError("adaptive rounds do not carry fixed bits", field=f"{prefix}.measure")
            rounds.append(Round(segment, measure, tuple(r.branches.items())))
        program = AdaptiveProgram(n, tuple(rounds), model.pbc)
        logger.debug(f"parsed adaptive program: n={n}, rounds={len(rounds)}")
        return CircuitFile(program.register(), spec_input, program=program)

    circuit = _circuit(n, model.pbc, model.gates or [], "gates")
    measure, bits = (None, None)
    if model.measure is not None:
        measure, bits = _measure(model.measure, n, "measure")
    logger.debug(f"parsed circuit: n={n}, gates={circuit.gate_count}, pbc={circuit.pbc}")
    return CircuitFile(circuit, spec_input, measure, bits)


# -----------------------------
# Domain -> canonical text
# -----------------------------


def _gate_dict(app: GateApplication) -> Dict[str, Any]:
    return {
        "pos": app.position,
        "pbc": app.wrap,
        "A": matrix_to_pairs(app.gate.A),
        "B": matrix_to_pairs(app.gate.B),
    }


def _input_dict(spec: InputSpec) -> Dict[str, Any]:
    if isinstance(spec, BasisInput):
        return {"type": "basis", "bits": spec.bits}
    return {"type": "product", "qubits": [{"theta": float(q.theta), "phi": float(q.phi)} for q in spec.qubits]}


def _measure_list(spec: MeasurementSpec, bits: Optional[str]) -> List[Dict[str, Any]]:
    out = []
    for idx, (q, basis) in enumerate(zip(spec.qubits, spec.bases)):
        entry: Dict[str, Any] = {"qubit": q}
        if basis.theta == 0.0 and basis.phi == 0.0:
            entry["basis"] = "Z"
        else:
            entry["basis"] = {"theta": float(basis.theta), "phi": float(basis.phi)}
        if bits is not None:
            entry["bit"] = int(bits[idx])
        out.append(entry)
    return out


def circuit_file_to_dict(doc: CircuitFile) -> Dict[str, Any]:
    data: Dict[str, Any] = {"n": doc.circuit.n, "pbc": doc.circuit.pbc}
    if doc.program is not None:
        data["pbc"] = doc.program.pbc
        data["rounds"] = [
            {
                "gates": [_gate_dict(app) for app in r.segment.gates],
                "measure": _measure_list(r.measure, None),
                "branches": dict(r.branches),
            }
            for r in doc.program.rounds
        ]
        data["input"] = _input_dict(doc.input)
        return data
    data["gates"] = [_gate_dict(app) for app in doc.circuit.gates]
    data["input"] = _input_dict(doc.input)
    if doc.measure is not None:
        data["measure"] = _measure_list(doc.measure, doc.outcome_bits)
    return data


def serialize_circuit(doc: CircuitFile) -> str:
    return _dump_json(circuit_file_to_dict(doc))
