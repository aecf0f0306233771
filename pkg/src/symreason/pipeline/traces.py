"""Per-problem pipeline records and the evaluation report.

Traces persist as schema-versioned JSONL, one problem per line, appended as
problems finish (so partial results survive interruption).  Reports
serialize canonically: keys sorted, timing fields isolated under "timing"
so byte-for-byte comparisons can exclude them.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from ..ir import TruthValue
from ..syntax import CspModel, FolProblem, LpProgram

SCHEMA_VERSION = 1

Parsed = Union[LpProgram, FolProblem, CspModel]
Verdict = Union[TruthValue, dict[str, TruthValue]]

ABSTAIN = "ABSTAIN"


@dataclass
class Formulation:
    """One attempt at a symbolic form: the raw provider output, the parsed
    program when parsing succeeded, and the round that produced it
    (0 = initial formulation)."""

    raw_text: str
    parsed: Parsed | None
    round: int
    errors: tuple[str, ...] = ()

    def is_valid(self) -> bool:
        return self.parsed is not None and not self.errors


@dataclass
class RoundRecord:
    round: int
    prompt: str
    response: str
    errors: tuple[str, ...] = ()  # parse or solver errors, rendered
    notes: tuple[str, ...] = ()  # non-fatal warnings (resource limits etc.)

    def has_errors(self) -> bool:
        return bool(self.errors)


def render_verdict(verdict: Verdict | None) -> str | dict[str, str] | None:
    if verdict is None:
        return None
    if isinstance(verdict, TruthValue):
        return verdict.value
    return {letter: tv.value for letter, tv in sorted(verdict.items())}


@dataclass
class PipelineTrace:
    problem_id: str
    task_kind: str
    rounds: list[RoundRecord] = field(default_factory=list)
    final_verdict: Verdict | None = None
    final_letter: str | None = None  # None renders as ABSTAIN
    gold_label: str | None = None
    aborted: bool = False
    notes: tuple[str, ...] = ()
    elapsed_seconds: float = 0.0

    def error_at_round(self, r: int) -> bool:
        """Error state at refinement round r, carrying the last attempt
        forward (a problem fixed at round 1 stays fixed at rounds 2, 3...)."""
        if not self.rounds:
            return True
        record = self.rounds[min(r, len(self.rounds) - 1)]
        return record.has_errors()

    def rounds_used(self) -> int:
        return len(self.rounds)

    def to_obj(self, include_timing: bool = True) -> dict:
        obj = {
            "schema_version": SCHEMA_VERSION,
            "problem_id": self.problem_id,
            "task_kind": self.task_kind,
            "rounds": [
                {
                    "round": r.round,
                    "prompt": r.prompt,
                    "response": r.response,
                    "errors": list(r.errors),
                    "notes": list(r.notes),
                }
                for r in self.rounds
            ],
            "final_verdict": render_verdict(self.final_verdict),
            "final_letter": self.final_letter or ABSTAIN,
            "gold_label": self.gold_label,
            "aborted": self.aborted,
            "notes": list(self.notes),
        }
        if include_timing:
            obj["timing"] = {"elapsed_seconds": self.elapsed_seconds}
        return obj


class TraceWriter:
    """Append-only JSONL sink; one line per finished problem."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text("")

    def append(self, trace: PipelineTrace):
        line = json.dumps(trace.to_obj(), sort_keys=True)
        with self._lock:
            with self.path.open("a") as fh:
                fh.write(line + "\n")


@dataclass
class EvalReport:
    dataset: str
    total: int
    with_gold: int
    correct: int
    accuracy: float
    abstentions: int
    error_rate_per_round: list[float]
    per_problem: list[dict]
    wall_seconds: float = 0.0

    def to_obj(self, include_timing: bool = True) -> dict:
        obj = {
            "schema_version": SCHEMA_VERSION,
            "dataset": self.dataset,
            "total": self.total,
            "with_gold": self.with_gold,
            "correct": self.correct,
            "accuracy": self.accuracy,
            "abstentions": self.abstentions,
            "error_rate_per_round": self.error_rate_per_round,
            "per_problem": self.per_problem,
        }
        if include_timing:
            obj["timing"] = {"wall_seconds": self.wall_seconds}
        return obj

    def to_canonical_json(self, include_timing: bool = True) -> str:
        return json.dumps(
            self.to_obj(include_timing=include_timing),
            sort_keys=True,
            indent=2,
        )

    def save(self, path: str | Path):
        Path(path).write_text(self.to_canonical_json() + "\n")
