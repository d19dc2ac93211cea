"""Episode trace and its JSONL serialization.

File layout, one JSON object per line:

* ``{"type": "header", "schema_version": 1, "config": {...}, "spawn": [...], ...}``
* ``{"type": "step", "k": ..., ...}`` for every movement step, ``k = 0`` being the
  initial scan at the spawn poses
* ``{"type": "decision", "index": ..., ...}`` written after the round it starts
* ``{"type": "summary", "status": ..., "final_er": ...}`` last

See docs/formats.md for the field list.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import LogParseError

SCHEMA_VERSION = 1


def _dumps(record: dict) -> str:
    return json.dumps(record, separators=(",", ":"), allow_nan=False)


@dataclass
class EpisodeLog:
    header: dict
    steps: list = field(default_factory=list)
    decisions: list = field(default_factory=list)
    summary: dict | None = None

    @property
    def n_agents(self) -> int:
        return int(self.header["config"]["n_agents"])

    @property
    def er_series(self) -> list[float]:
        return [float(s["er"]) for s in self.steps]

    @property
    def final_er(self) -> float:
        return float(self.summary["final_er"])

    def records(self):
        yield {"type": "header", **self.header}
        decisions = iter(self.decisions)
        pending = next(decisions, None)
        for step in self.steps:
            while pending is not None and pending["end_step"] < step["k"]:
                yield {"type": "decision", **pending}
                pending = next(decisions, None)
            yield {"type": "step", **step}
        while pending is not None:
            yield {"type": "decision", **pending}
            pending = next(decisions, None)
        if self.summary is not None:
            yield {"type": "summary", **self.summary}

    def to_jsonl(self) -> str:
        return "".join(_dumps(r) + "\n" for r in self.records())

    def save(self, path) -> None:
        Path(path).write_text(self.to_jsonl(), encoding="utf-8")

    @classmethod
    def from_jsonl(cls, text: str) -> "EpisodeLog":
        log = None
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                kind = record.pop("type")
            except (ValueError, KeyError, AttributeError) as exc:
                raise LogParseError(f"line {lineno}: {exc}") from None
            if kind == "header":
                if log is not None:
                    raise LogParseError(f"line {lineno}: duplicate header")
                if record.get("schema_version") != SCHEMA_VERSION:
                    raise LogParseError(
                        f"line {lineno}: unsupported schema version {record.get('schema_version')}"
                    )
                log = cls(header=record)
                continue
            if log is None:
                raise LogParseError(f"line {lineno}: record before header")
            if kind == "step":
                log.steps.append(record)
            elif kind == "decision":
                log.decisions.append(record)
            elif kind == "summary":
                log.summary = record
            else:
                raise LogParseError(f"line {lineno}: unknown record type {kind!r}")
        if log is None:
            raise LogParseError("empty log")
        log.validate()
        return log

    @classmethod
    def load(cls, path) -> "EpisodeLog":
        return cls.from_jsonl(Path(path).read_text(encoding="utf-8"))

    def validate(self) -> None:
        if self.summary is None:
            raise LogParseError("log has no summary record (incomplete episode)")
        if not self.steps or self.steps[0]["k"] != 0:
            raise LogParseError("log must start with the step-0 record")
        for i, step in enumerate(self.steps):
            if step["k"] != i:
                raise LogParseError(f"step records out of order at k={step['k']}")
            if len(step["agents"]) != self.n_agents:
                raise LogParseError(f"step {i} has {len(step['agents'])} agents")
        for i, dec in enumerate(self.decisions):
            if dec["index"] != i:
                raise LogParseError(f"decision records out of order at index={dec['index']}")
