"""Machine-readable reports with lossless serialization.

All floating-point values are canonicalized to 12 significant digits when the
report is built, so text, JSON and CSV output round-trip exactly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field


def canonical_float(x) -> float:
    return float(f"{float(x):.11e}")


def _canonical_value(v):
    if isinstance(v, bool) or isinstance(v, (int, str)):
        return v
    if isinstance(v, float):
        return canonical_float(v)
    try:
        return canonical_float(float(v))
    except (TypeError, ValueError):
        return str(v)


@dataclass
class Report:
    command: str
    inputs_digest: str
    seed: int
    version: str
    results: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)

    def __post_init__(self):
        self.results = {k: _canonical_value(v) for k, v in self.results.items()}
        self.flags = {k: bool(v) for k, v in self.flags.items()}

    @property
    def passed(self) -> bool:
        return all(self.flags.values())

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "inputs_digest": self.inputs_digest,
            "seed": self.seed,
            "version": self.version,
            "results": self.results,
            "flags": self.flags,
        }
        return json.dumps(payload, sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        data = json.loads(text)
        return cls(command=data["command"], inputs_digest=data["inputs_digest"],
                   seed=data["seed"], version=data["version"],
                   results=data["results"], flags=data["flags"])

    def to_text(self) -> str:
        lines = [f"command: {self.command}",
                 f"inputs_digest: {self.inputs_digest}",
                 f"seed: {self.seed}",
                 f"version: {self.version}"]
        for k in sorted(self.results):
            v = self.results[k]
            if isinstance(v, float):
                lines.append(f"{k} = {v:.11e}")
            else:
                lines.append(f"{k} = {v}")
        for k in sorted(self.flags):
            lines.append(f"{k}: {'PASS' if self.flags[k] else 'FAIL'}")
        return "\n".join(lines)

    def to_csv(self) -> str:
        lines = ["name,value"]
        for k in sorted(self.results):
            v = self.results[k]
            lines.append(f"{k},{v:.11e}" if isinstance(v, float) else f"{k},{v}")
        for k in sorted(self.flags):
            lines.append(f"{k},{int(self.flags[k])}")
        return "\n".join(lines) + "\n"


def digest_of(obj) -> str:
    return hashlib.sha256(
        json.dumps(obj, sort_keys=True, default=str).encode()).hexdigest()[:16]
