import hashlib
import json
import shlex
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import pandas as pd


VERSION = "0.1.0"
SIGNIFICANT_DIGITS = 15


def round_probability(p: float) -> float:
    """Echo with 15 significant digits."""
    return float(format(float(p), f".{SIGNIFICANT_DIGITS}g"))


def input_digest(raw: bytes) -> str:
    return "sha256:" + hashlib.sha256(raw).hexdigest()


def frame_records(frame: pd.DataFrame) -> List[Dict[str, Any]]:
    records = frame.to_dict(orient="records")
    return [{k: (round_probability(v) if isinstance(v, float) else v) for k, v in row.items()} for row in records]


@dataclass
class RunReport:
    """Machine-readable record of one command run."""

    command: str
    file: str
    digest: str
    results: Dict[str, Any] = field(default_factory=dict)
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)
    seed: Optional[int] = None
    timing: Optional[float] = None
    argv: Optional[List[str]] = None
    version: str = VERSION

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"command": self.command}
        if self.argv is not None:
            data["argv"] = list(self.argv)
        data.update({"file": self.file, "input_digest": self.digest, "version": self.version})
        if self.seed is not None:
            data["seed"] = self.seed
        data["results"] = {
            k: round_probability(v) if isinstance(v, float) else v for k, v in self.results.items()
        }
        for name, frame in self.tables.items():
            data["results"][name] = frame_records(frame)
        if self.timing is not None:
            data["timing_seconds"] = self.timing
        return data

    def to_machine(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        lines = [f"command: {self.command}"]
        if self.argv is not None:
            lines.append(f"argv: {shlex.join(self.argv)}")
        lines += [f"file: {self.file}", f"input: {self.digest}"]
        if self.seed is not None:
            lines.append(f"seed: {self.seed}")
        for key, value in self.results.items():
            shown = round_probability(value) if isinstance(value, float) else value
            if isinstance(shown, (dict, list)):
                shown = json.dumps(shown)
            lines.append(f"{key}: {shown}")
        for name, frame in self.tables.items():
            lines.append(f"{name}:")
            lines.append(frame.to_string(index=False, float_format=lambda v: format(v, f".{SIGNIFICANT_DIGITS}g")))
        if self.timing is not None:
            lines.append(f"time: {self.timing:.6f} s")
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        return self.to_machine() if fmt == "machine" else self.to_text()
