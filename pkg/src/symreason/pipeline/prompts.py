"""Prompt assembly from plain-text templates.

A template file is a task description followed by a per-problem block that
uses the [[CONTEXT]], [[QUESTION]], and [[OPTIONS]] placeholders and ends
with the empty section scaffold the formulator is expected to fill in.
Demonstrations repeat the block with a completed symbolic program in place
of the scaffold; the target problem keeps the scaffold.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..errors import MissingTemplate
from .problems import Problem, TaskKind

PLACEHOLDER_CONTEXT = "[[CONTEXT]]"
PLACEHOLDER_QUESTION = "[[QUESTION]]"
PLACEHOLDER_OPTIONS = "[[OPTIONS]]"
PLACEHOLDER_FORMULATION = "[[FORMULATION]]"
PLACEHOLDER_ERRORS = "[[ERRORS]]"

DEFAULT_TEMPLATE_IDS = {
    TaskKind.DEDUCTIVE: "prontoqa",
    TaskKind.FOL: "folio",
    TaskKind.CSP: "logical_deduction",
}

REFINEMENT_TEMPLATE_IDS = {
    TaskKind.DEDUCTIVE: "refine_lp",
    TaskKind.FOL: "refine_fol",
    TaskKind.CSP: "refine_csp",
}

_SCAFFOLD_HEADERS = {
    "Predicates:",
    "Facts:",
    "Rules:",
    "Query:",
    "Domain:",
    "Variables:",
    "Constraints:",
}


@dataclass(frozen=True)
class FewShotExample:
    context: str
    question: str
    options: tuple[str, ...]
    completion: str


@dataclass(frozen=True)
class PromptTemplate:
    template_id: str
    preamble: str  # task description, emitted once
    problem_block: str  # Context/Question[/Options] layout with placeholders
    scaffold: str  # empty section headers appended after the target problem

    def render_block(self, context: str, question: str, options: list[str]) -> str:
        text = self.problem_block
        text = text.replace(PLACEHOLDER_CONTEXT, context)
        text = text.replace(PLACEHOLDER_QUESTION, question)
        text = text.replace(PLACEHOLDER_OPTIONS, "\n".join(options))
        return text


def parse_template(template_id: str, text: str) -> PromptTemplate:
    """Split a template file into preamble, problem block, and scaffold.

    The block starts at the first `Context:` line; the scaffold is the
    trailing run of bare section-header lines."""
    lines = text.splitlines()
    start = next(
        (i for i, line in enumerate(lines) if line.startswith("Context:")), None
    )
    if start is None:
        raise MissingTemplate(
            "template %r has no 'Context:' line" % template_id
        )
    preamble = "\n".join(lines[:start]).strip("\n")
    rest = lines[start:]
    while rest and not rest[-1].strip():
        rest.pop()
    cut = len(rest)
    while cut > 0 and (
        not rest[cut - 1].strip() or rest[cut - 1].strip() in _SCAFFOLD_HEADERS
    ):
        cut -= 1
    block = "\n".join(rest[:cut]).strip("\n")
    scaffold = "\n".join(line for line in rest[cut:] if line.strip())
    return PromptTemplate(template_id, preamble, block, scaffold)


class TemplateStore:
    """Loads shipped templates (package data) or a custom directory laid out
    the same way: `<id>.txt` plus optional `<id>.examples.json`."""

    def __init__(self, directory: str | Path | None = None):
        self._dir = Path(directory) if directory is not None else None

    def _read(self, filename: str) -> str | None:
        if self._dir is not None:
            candidate = self._dir / filename
            return candidate.read_text() if candidate.exists() else None
        ref = resources.files("symreason").joinpath("templates", filename)
        return ref.read_text() if ref.is_file() else None

    def template(self, template_id: str) -> PromptTemplate:
        text = self._read(template_id + ".txt")
        if text is None:
            raise MissingTemplate("no template named %r" % template_id)
        return parse_template(template_id, text)

    def examples(self, template_id: str) -> list[FewShotExample]:
        text = self._read(template_id + ".examples.json")
        if text is None:
            return []
        out = []
        for obj in json.loads(text):
            out.append(
                FewShotExample(
                    context=obj["context"],
                    question=obj["question"],
                    options=tuple(obj.get("options", ())),
                    completion=obj["completion"],
                )
            )
        return out

    def refinement_template(self, kind: TaskKind) -> str:
        name = REFINEMENT_TEMPLATE_IDS[kind]
        text = self._read(name + ".txt")
        if text is None:
            raise MissingTemplate("no refinement template for %s" % kind.value)
        return text


def format_options(options: tuple[tuple[str, str], ...]) -> list[str]:
    return ["%s) %s" % (letter, text) for letter, text in options]


def build_prompt(
    problem: Problem,
    template: PromptTemplate,
    examples: list[FewShotExample],
) -> str:
    """Task description, the demonstrations, then the target problem ending
    with the empty section scaffold."""
    parts = [template.preamble]
    for ex in examples:
        demo = template.render_block(ex.context, ex.question, list(ex.options))
        parts.append(demo + "\n\n" + ex.completion.strip("\n"))
    target = template.render_block(
        problem.context, problem.question, format_options(problem.options)
    )
    parts.append(target + "\n\n" + template.scaffold)
    return "\n\n".join(parts) + "\n"


def build_refinement_prompt(
    template_text: str, formulation_text: str, error_messages: list[str]
) -> str:
    """Erroneous logic form plus the solver/parser messages, wrapped in the
    per-language correction-demonstration template."""
    text = template_text.replace(PLACEHOLDER_FORMULATION, formulation_text.strip("\n"))
    text = text.replace(PLACEHOLDER_ERRORS, "\n".join(error_messages))
    return text
