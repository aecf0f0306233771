"""The three-stage loop: formulate with a provider, solve with the matching
engine, interpret the verdict onto an option letter — plus self-refinement
driven by parser/solver error messages.

Execution errors (engine exceptions) and parse errors are both refinable;
resource exhaustion instead degrades the verdict to Unknown with a note, per
the three-valued contract.
"""

from __future__ import annotations

import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

from ..csp_engine import option_truth, solve_all
from ..errors import (
    EngineError,
    ParseFailure,
    ProviderError,
    ResourceExhausted,
    UnsatisfiableModel,
)
from ..fol_engine import ProverLimits, resolve_entailment
from ..ir import TruthValue
from ..lp_engine import LpLimits, lp_query
from ..syntax import CspModel, FolProblem, LpProgram, parse_csp, parse_fol, parse_lp
from .problems import Problem, TaskKind, load_dataset
from .prompts import (
    DEFAULT_TEMPLATE_IDS,
    TemplateStore,
    build_prompt,
    build_refinement_prompt,
)
from .providers import Provider
from .traces import (
    EvalReport,
    Formulation,
    PipelineTrace,
    RoundRecord,
    TraceWriter,
    Verdict,
)

BACKOFF_POLICIES = ("abstain", "fixed-first", "seeded-random")


@dataclass(frozen=True)
class PipelineConfig:
    max_rounds: int = 3
    num_examples: int = 2
    backoff: str = "abstain"
    rng_seed: int = 0
    symbolic_budget_seconds: float = 30.0
    max_solutions: int = 10_000
    lp_limits: LpLimits = field(default_factory=LpLimits)
    prover_limits: ProverLimits = field(default_factory=ProverLimits)
    template_ids: dict[TaskKind, str] = field(
        default_factory=lambda: dict(DEFAULT_TEMPLATE_IDS)
    )
    template_dir: str | None = None
    workers: int | None = None  # None = logical core count

    def __post_init__(self):
        if self.backoff not in BACKOFF_POLICIES:
            raise ValueError(
                "backoff must be one of %s" % (BACKOFF_POLICIES,)
            )
        if self.max_rounds < 0:
            raise ValueError("max_rounds must be >= 0")

    def store(self) -> TemplateStore:
        return TemplateStore(self.template_dir)


_PARSERS: dict[TaskKind, Callable] = {
    TaskKind.DEDUCTIVE: parse_lp,
    TaskKind.FOL: parse_fol,
    TaskKind.CSP: parse_csp,
}


def parse_formulation(kind: TaskKind, raw_text: str, round_no: int) -> Formulation:
    """Parse provider output into the task's symbolic form; parse failures
    are recorded on the Formulation, not raised."""
    try:
        parsed = _PARSERS[kind](raw_text)
    except ParseFailure as exc:
        return Formulation(
            raw_text, None, round_no, tuple(e.render() for e in exc.errors)
        )
    return Formulation(raw_text, parsed, round_no)


def formulate(
    problem: Problem,
    provider: Provider,
    config: PipelineConfig,
    store: TemplateStore | None = None,
) -> tuple[Formulation, str]:
    """Initial formulation (round 0); returns it with the prompt used."""
    store = store or config.store()
    template = store.template(config.template_ids[problem.kind])
    examples = store.examples(template.template_id)[: config.num_examples]
    prompt = build_prompt(problem, template, examples)
    raw = provider.complete(prompt, key=problem.id)
    return parse_formulation(problem.kind, raw, 0), prompt


def solve_symbolic(
    formulation: Formulation,
    config: PipelineConfig | None = None,
    deadline: float | None = None,
) -> Verdict:
    """Dispatch a parsed formulation to its engine.

    Deductive and FOL problems get one TruthValue; constraint models get a
    per-option verdict map.  Engine errors propagate to the caller, which
    treats them as refinable execution errors.
    """
    config = config or PipelineConfig()
    parsed = formulation.parsed
    if parsed is None:
        raise ValueError("solve_symbolic needs a parsed formulation")
    if isinstance(parsed, LpProgram):
        return lp_query(parsed, replace(config.lp_limits, deadline=deadline))
    if isinstance(parsed, FolProblem):
        return resolve_entailment(
            list(parsed.facts),
            parsed.query,
            replace(config.prover_limits, deadline=deadline),
        )
    if isinstance(parsed, CspModel):
        solutions, _ = solve_all(
            parsed, max_solutions=config.max_solutions, deadline=deadline
        )
        if not solutions:
            raise UnsatisfiableModel("the constraint model has no solutions")
        return {
            option.letter: option_truth(solutions, option.expr)
            for option in parsed.options
        }
    raise TypeError("unknown formulation type: %r" % (parsed,))


def interpret(
    verdict: Verdict,
    problem: Problem,
    policy: str = "abstain",
    seed: int = 0,
) -> str | None:
    """Map an engine verdict onto an option letter; None means Abstain.

    Three-valued verdicts pick the option whose text means true/false/
    unknown.  Option maps pick the unique Proved letter.  When nothing
    matches, the backoff policy decides: abstain (default), fixed-first,
    or seeded-random (deterministic per problem id).
    """
    letter: str | None = None
    if isinstance(verdict, TruthValue):
        letter = problem.option_for_verdict(verdict)
    else:
        proved = [l for l, tv in sorted(verdict.items()) if tv is TruthValue.PROVED]
        if len(proved) == 1 and proved[0] in problem.letters:
            letter = proved[0]
    if letter is not None:
        return letter
    if policy == "fixed-first":
        return problem.letters[0]
    if policy == "seeded-random":
        rng = random.Random("%d:%s" % (seed, problem.id))
        return rng.choice(problem.letters)
    return None


def self_refine(
    formulation: Formulation,
    errors: list[str],
    provider: Provider,
    config: PipelineConfig,
    problem: Problem,
    store: TemplateStore | None = None,
    diagnose: Callable[[Formulation], list[str]] | None = None,
) -> tuple[Formulation, list[RoundRecord], bool]:
    """Iteratively re-prompt with the erroneous logic form and the error
    messages until no errors remain or max_rounds is reached.

    Returns the last formulation (valid or not), one RoundRecord per
    refinement attempt, and whether a provider failure aborted the loop.
    `diagnose` re-checks a new formulation; the default only reports parse
    errors, the pipeline also runs the solver.
    """
    store = store or config.store()
    diagnose = diagnose or (lambda f: list(f.errors))
    template_text = store.refinement_template(problem.kind)
    records: list[RoundRecord] = []
    current, current_errors = formulation, list(errors)
    while current_errors and current.round < config.max_rounds:
        prompt = build_refinement_prompt(
            template_text, current.raw_text, current_errors
        )
        try:
            raw = provider.complete(prompt, key=problem.id)
        except ProviderError as exc:
            records.append(
                RoundRecord(
                    current.round + 1,
                    prompt,
                    "",
                    errors=tuple(current_errors),
                    notes=("provider error aborted refinement: %s" % exc,),
                )
            )
            return current, records, True
        current = parse_formulation(problem.kind, raw, current.round + 1)
        current_errors = diagnose(current)
        records.append(
            RoundRecord(current.round, prompt, raw, errors=tuple(current_errors))
        )
    return current, records, False


def run_problem(
    problem: Problem,
    provider: Provider,
    config: PipelineConfig | None = None,
    store: TemplateStore | None = None,
) -> PipelineTrace:
    """Full pipeline for one problem: formulate, solve, refine on errors,
    interpret.  Never raises for provider/parse/engine trouble; everything
    lands in the trace."""
    config = config or PipelineConfig()
    store = store or config.store()
    trace = PipelineTrace(
        problem_id=problem.id,
        task_kind=problem.kind.value,
        gold_label=problem.gold_label,
    )
    started = time.monotonic()

    verdict: Verdict | None = None
    notes: list[str] = []

    def attempt_solve(f: Formulation) -> tuple[Verdict | None, list[str], list[str]]:
        """-> (verdict, refinable errors, notes)."""
        if f.parsed is None:
            return None, list(f.errors), []
        deadline = time.monotonic() + config.symbolic_budget_seconds
        try:
            return solve_symbolic(f, config, deadline), [], []
        except ResourceExhausted as exc:
            fallback: Verdict
            if isinstance(f.parsed, CspModel):
                fallback = {o.letter: TruthValue.UNKNOWN for o in f.parsed.options}
            else:
                fallback = TruthValue.UNKNOWN
            return fallback, [], ["resource limit: %s" % exc]
        except EngineError as exc:
            return None, ["%s: %s" % (exc.__class__.__name__, exc)], []

    try:
        formulation, prompt = formulate(problem, provider, config, store)
    except ProviderError as exc:
        trace.aborted = True
        trace.notes = ("provider error before formulation: %s" % exc,)
        trace.elapsed_seconds = time.monotonic() - started
        return trace

    verdict, errors, round_notes = attempt_solve(formulation)
    trace.rounds.append(
        RoundRecord(
            0, prompt, formulation.raw_text,
            errors=tuple(errors), notes=tuple(round_notes),
        )
    )

    if errors and config.max_rounds > 0:

        def diagnose(f: Formulation) -> list[str]:
            nonlocal verdict
            v, errs, ns = attempt_solve(f)
            if not errs:
                verdict = v
                if ns:
                    notes.extend(ns)
            return errs

        _, refine_records, aborted = self_refine(
            formulation, errors, provider, config, problem, store, diagnose
        )
        trace.rounds.extend(refine_records)
        trace.aborted = aborted
        if trace.rounds[-1].has_errors():
            verdict = None

    trace.final_verdict = verdict
    trace.final_letter = (
        interpret(verdict, problem, config.backoff, config.rng_seed)
        if verdict is not None
        else None
    )
    if verdict is None and not trace.aborted:
        notes.append("no valid formulation after refinement; abstaining")
    if isinstance(verdict, dict):
        proved = [l for l, tv in sorted(verdict.items()) if tv is TruthValue.PROVED]
        if len(proved) != 1:
            notes.append(
                "%d options proved; expected exactly one" % len(proved)
            )
    trace.notes = tuple([*trace.notes, *notes])
    trace.elapsed_seconds = time.monotonic() - started
    return trace


def run_eval(
    dataset_path: str | Path,
    provider: Provider,
    config: PipelineConfig | None = None,
    trace_path: str | Path | None = None,
) -> EvalReport:
    """Evaluate a dataset with bounded parallelism.

    Accuracy counts problems with gold labels; abstentions are never
    correct.  error_rate_per_round has max_rounds+1 entries: the fraction
    of problems whose formulation at that round was invalid (carrying each
    problem's last attempt forward).
    """
    config = config or PipelineConfig()
    store = config.store()
    problems = load_dataset(dataset_path)
    writer = TraceWriter(trace_path) if trace_path is not None else None
    started = time.monotonic()

    def work(problem: Problem) -> PipelineTrace:
        trace = run_problem(problem, provider, config, store)
        if writer is not None:
            writer.append(trace)
        return trace

    if problems:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            traces = list(pool.map(work, problems))
    else:
        traces = []

    with_gold = [t for t in traces if t.gold_label is not None]
    correct = sum(1 for t in with_gold if t.final_letter == t.gold_label)
    abstentions = sum(1 for t in traces if t.final_letter is None)
    n_rounds = config.max_rounds + 1
    error_rate = [
        (
            sum(1 for t in traces if t.error_at_round(r)) / len(traces)
            if traces
            else 0.0
        )
        for r in range(n_rounds)
    ]
    per_problem = [
        {
            "id": t.problem_id,
            "letter": t.final_letter or "ABSTAIN",
            "gold": t.gold_label,
            "correct": (
                t.final_letter == t.gold_label if t.gold_label is not None else None
            ),
            "rounds_used": t.rounds_used(),
            "error_rounds": [t.error_at_round(r) for r in range(n_rounds)],
        }
        for t in traces
    ]
    return EvalReport(
        dataset=Path(dataset_path).name,
        total=len(traces),
        with_gold=len(with_gold),
        correct=correct,
        accuracy=(correct / len(with_gold)) if with_gold else 0.0,
        abstentions=abstentions,
        error_rate_per_round=error_rate,
        per_problem=per_problem,
        wall_seconds=time.monotonic() - started,
    )
