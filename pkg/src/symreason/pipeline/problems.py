"""Problem records and the line-oriented dataset format.

One JSON record per line: id, kind (deductive|fol|csp), context, question,
options, and an optional gold letter.  Options are either a list of texts
(letters assigned from A) or [letter, text] pairs.  For deductive and FOL
problems every option text must map onto the true/false/unknown keyword
table; that is checked at load time so bad datasets fail fast.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from ..errors import DatasetFormatError
from ..ir import TruthValue


class TaskKind(Enum):
    DEDUCTIVE = "deductive"
    FOL = "fol"
    CSP = "csp"

    @classmethod
    def from_wire(cls, value: str) -> "TaskKind":
        try:
            return cls(value.strip().lower())
        except ValueError:
            raise DatasetFormatError(
                "unknown task kind %r; expected one of deductive, fol, csp" % value
            ) from None


_VERDICT_KEYWORDS = {
    "true": "true",
    "proved": "true",
    "false": "false",
    "disproved": "false",
    "unknown": "unknown",
    "uncertain": "unknown",
}

_VERDICT_CLASS = {
    TruthValue.PROVED: "true",
    TruthValue.DISPROVED: "false",
    TruthValue.UNKNOWN: "unknown",
}


def verdict_class(option_text: str) -> str | None:
    """Normalize an option text to its verdict keyword class, if any."""
    return _VERDICT_KEYWORDS.get(option_text.strip().strip(".").strip().lower())


@dataclass(frozen=True)
class Problem:
    id: str
    kind: TaskKind
    context: str
    question: str
    options: tuple[tuple[str, str], ...]  # (letter, text), letters from A
    gold_label: str | None = None

    def __post_init__(self):
        if len(self.options) < 2:
            raise DatasetFormatError(
                "problem %r needs at least 2 options" % self.id
            )
        expected = tuple(string.ascii_uppercase[: len(self.options)])
        letters = tuple(letter for letter, _ in self.options)
        if letters != expected:
            raise DatasetFormatError(
                "problem %r has option letters %r; expected consecutive "
                "letters from A" % (self.id, letters)
            )
        if self.gold_label is not None and self.gold_label not in letters:
            raise DatasetFormatError(
                "problem %r gold label %r is not an option letter"
                % (self.id, self.gold_label)
            )

    @property
    def letters(self) -> tuple[str, ...]:
        return tuple(letter for letter, _ in self.options)

    def option_for_verdict(self, verdict: TruthValue) -> str | None:
        """The option letter whose text means the verdict, when one exists."""
        wanted = _VERDICT_CLASS[verdict]
        for letter, text in self.options:
            if verdict_class(text) == wanted:
                return letter
        return None


def problem_from_obj(obj: dict, where: str = "?") -> Problem:
    try:
        raw_options = obj["options"]
        if not isinstance(raw_options, list):
            raise DatasetFormatError("%s: options must be a list" % where)
        options: list[tuple[str, str]] = []
        for i, entry in enumerate(raw_options):
            if isinstance(entry, str):
                options.append((string.ascii_uppercase[i], entry))
            elif (
                isinstance(entry, (list, tuple))
                and len(entry) == 2
                and all(isinstance(x, str) for x in entry)
            ):
                options.append((entry[0], entry[1]))
            else:
                raise DatasetFormatError(
                    "%s: option %d must be a text or a [letter, text] pair"
                    % (where, i)
                )
        problem = Problem(
            id=str(obj["id"]),
            kind=TaskKind.from_wire(str(obj["kind"])),
            context=str(obj["context"]),
            question=str(obj["question"]),
            options=tuple(options),
            gold_label=obj.get("gold"),
        )
    except KeyError as exc:
        raise DatasetFormatError("%s: missing field %s" % (where, exc)) from None
    if problem.kind in (TaskKind.DEDUCTIVE, TaskKind.FOL):
        for letter, text in problem.options:
            if verdict_class(text) is None:
                raise DatasetFormatError(
                    "%s: option %s) %r does not name a verdict "
                    "(true/false/unknown/uncertain)" % (where, letter, text)
                )
    return problem


def load_dataset(path: str | Path) -> list[Problem]:
    """Read a JSONL dataset; raises DatasetFormatError naming the bad line."""
    problems: list[Problem] = []
    seen_ids: set[str] = set()
    path = Path(path)
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        where = "%s:%d" % (path.name, lineno)
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DatasetFormatError("%s: not valid JSON (%s)" % (where, exc)) from None
        if not isinstance(obj, dict):
            raise DatasetFormatError("%s: record must be a JSON object" % where)
        problem = problem_from_obj(obj, where)
        if problem.id in seen_ids:
            raise DatasetFormatError(
                "%s: duplicate problem id %r" % (where, problem.id)
            )
        seen_ids.add(problem.id)
        problems.append(problem)
    return problems


def problem_to_obj(problem: Problem) -> dict:
    return {
        "id": problem.id,
        "kind": problem.kind.value,
        "context": problem.context,
        "question": problem.question,
        "options": [[letter, text] for letter, text in problem.options],
        "gold": problem.gold_label,
    }
