"""First-order prover: CNF conversion, resolution entailment, and the
finite-model enumeration oracle used to cross-check it."""

from .cnf import SkolemState, clausify, clausify_all, skolemize, standardize_apart, to_nnf
from .models import (
    ModelCount,
    entailment_by_enumeration,
    enumerate_models,
    evaluate_formula,
)
from .resolution import (
    DerivationStep,
    EntailmentReport,
    ProverLimits,
    SaturationResult,
    entailment_report,
    factors,
    resolve_entailment,
    resolvents,
    saturate,
    subsumes,
)
from .unify import unify_atoms, unify_terms

__all__ = [
    "DerivationStep",
    "EntailmentReport",
    "ModelCount",
    "ProverLimits",
    "SaturationResult",
    "SkolemState",
    "clausify",
    "clausify_all",
    "entailment_by_enumeration",
    "entailment_report",
    "enumerate_models",
    "evaluate_formula",
    "factors",
    "resolve_entailment",
    "resolvents",
    "saturate",
    "skolemize",
    "standardize_apart",
    "subsumes",
    "to_nnf",
    "unify_atoms",
    "unify_terms",
]
