"""Origami: program synthesis by evolving the typed gaps of recursion-scheme
templates over a small strongly typed expression language."""
from __future__ import annotations

from .bench import (
    Problem, RunReport, RunResult, generate_cases, get_problem, oracle,
    registry, run_benchmark, write_csv, write_json,
)
from .exprs import eval_expr, parse_expr, render, typecheck
from .primitives import BUILTIN_REGISTRY, Registry, builtin_set, user_set
from .schemes import run_accu, run_ana, run_cata, run_hylo
from .synth import (
    EvolveResult, Genome, GPConfig, derive_seed, evolve, fitness, solve,
)
from .templates import (
    Program, Template, TemplateKind, assemble, build_template,
    candidate_schemes, candidate_template_kinds,
)
from .types import Signature, parse_signature, parse_type, show_type, unify

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_REGISTRY", "EvolveResult", "GPConfig", "Genome", "Problem",
    "Program", "Registry", "RunReport", "RunResult", "Signature", "Template",
    "TemplateKind", "assemble", "build_template", "builtin_set",
    "candidate_schemes", "candidate_template_kinds", "derive_seed",
    "eval_expr", "evolve", "fitness", "generate_cases", "get_problem",
    "oracle", "parse_expr", "parse_signature", "parse_type", "registry",
    "render", "run_accu", "run_ana", "run_benchmark", "run_cata", "run_hylo",
    "show_type", "solve", "typecheck", "unify", "user_set", "write_csv",
    "write_json", "__version__",
]
