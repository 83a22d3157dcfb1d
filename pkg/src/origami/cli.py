"""Command line entry point."""
from __future__ import annotations

import argparse
import os
import random
import sys

from .bench import (
    generate_cases, get_problem, parse_genome_text, registry,
    report_csv, report_json, run_benchmark, write_csv, write_json,
)
from .exprs import parse_expr, render
from .primitives import UnknownProblem
from .solutions import EXACT_FIXTURES, FIXTURES, fixture_program, load_fixture
from .synth import GPConfig, solve
from .templates import (
    SchemeKind, TemplateKind, assemble, build_template,
    candidate_template_kinds, template_kind_from_label, value_to_expr,
)
from .types import show_signature
from .values import EvalSignal


def _add_gp_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None,
                   help="master seed (default: ORIGAMI_SEED or 0)")
    p.add_argument("--pop", type=int, default=None, help="population size")
    p.add_argument("--gens", type=int, default=None, help="generation budget")
    p.add_argument("--max-depth", type=int, default=None,
                   help="expression depth limit")
    p.add_argument("--tournament", type=int, default=None,
                   help="tournament size")
    p.add_argument("--fuel", type=int, default=None,
                   help="evaluation fuel per program call")
    p.add_argument("--max-steps", type=int, default=None,
                   help="unfold step limit")
    p.add_argument("--time-limit", type=float, default=None,
                   help="wall clock budget per run, seconds")
    kind = p.add_mutually_exclusive_group()
    kind.add_argument("--template", choices=[k.value for k in TemplateKind],
                      help="force one template kind")
    kind.add_argument("--scheme", choices=[s.value for s in SchemeKind],
                      help="restrict the race to one scheme")


def _config(args: argparse.Namespace) -> GPConfig:
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("ORIGAMI_SEED", "0"))
    cfg = GPConfig(seed=seed)
    overrides = {
        "population_size": args.pop,
        "max_generations": args.gens,
        "max_depth": args.max_depth,
        "tournament_size": args.tournament,
        "fuel": args.fuel,
        "max_steps": args.max_steps,
        "time_limit_s": args.time_limit,
    }
    from dataclasses import replace
    return replace(cfg, **{k: v for k, v in overrides.items() if v is not None})


def _forced_kinds(args: argparse.Namespace, problem):
    if args.template:
        return template_kind_from_label(args.template), None
    if args.scheme:
        kinds = tuple(k for k in candidate_template_kinds(problem.signature)
                      if k.scheme.value == args.scheme)
        if not kinds:
            kinds = tuple(k for k in TemplateKind
                          if k.scheme.value == args.scheme)
        return None, kinds
    return None, None


def _cmd_synth(args: argparse.Namespace) -> int:
    problem = get_problem(args.problem)
    config = _config(args)
    kind, kinds = _forced_kinds(args, problem)
    res = solve(problem, config, kind, kinds)
    print(f"problem: {problem.name}")
    print(f"template: {res.template.kind.value}")
    print(f"solved: {'true' if res.solved else 'false'}")
    print(f"generations: {res.generations}")
    print(f"seconds: {res.seconds:.3f}")
    if res.genome.seed_gene is not None:
        tag, v = res.genome.seed_gene
        text = f"arg{v}" if tag == "arg" else render(
            value_to_expr(v, res.template.seed_type))
        print(f"seed: {text}")
    for name in res.template.slot_names():
        print(f"{name}: {render(res.genome.slot_exprs[name])}")
    return 0 if res.solved else 1


def _cmd_bench(args: argparse.Namespace) -> int:
    problem = get_problem(args.problem)
    config = _config(args)
    kind, kinds = _forced_kinds(args, problem)
    if kinds is not None and len(kinds) == 1:
        kind, kinds = kinds[0], None
    if kinds is not None:
        print("bench races one forced kind at most; pick --template",
              file=sys.stderr)
        return 2
    report = run_benchmark(problem, args.runs, config, kind,
                           parallel=args.parallel)
    if args.out:
        if args.format == "json":
            write_json(report, args.out, args.timing)
        else:
            write_csv(report, args.out, args.timing)
        print(f"wrote {args.out}")
    else:
        text = (report_json(report, args.timing) if args.format == "json"
                else report_csv(report, args.timing))
        sys.stdout.write(text)
    secs = sum(r.seconds for r in report.runs)
    print(f"{problem.name}: {report.solved_count}/{len(report.runs)} solved "
          f"in {secs:.1f}s", file=sys.stderr)
    return 0


def _cmd_list(_args: argparse.Namespace) -> int:
    for name, p in registry().items():
        kinds = ", ".join(k.value for k in candidate_template_kinds(p.signature))
        print(f"{name:28s} {show_signature(p.signature):34s} [{kinds}]")
    return 0


def _cmd_verify(_args: argparse.Namespace) -> int:
    failures = 0
    for name in FIXTURES:
        problem, _kind, _genome = load_fixture(name)
        program = fixture_program(name)
        if name in EXACT_FIXTURES:
            cases = generate_cases(problem, 100, random.Random(0))
        else:
            cases = [(inputs, problem.oracle_fn(*inputs))
                     for inputs in problem.edge_cases[:2]]
        bad = 0
        for inputs, expected in cases:
            try:
                if program(inputs) != expected:
                    bad += 1
            except EvalSignal:
                bad += 1
        if bad:
            failures += 1
            print(f"FAIL {name}: {bad}/{len(cases)} cases differ")
        else:
            print(f"ok   {name} ({len(cases)} cases)")
    return 1 if failures else 0


def _cmd_eval(args: argparse.Namespace) -> int:
    with open(args.genome) as f:
        problem, kind, genome = parse_genome_text(f.read())
    template = build_template(kind, problem.signature, problem.registry)
    program = assemble(template, genome, registry=problem.registry)
    params = problem.signature.params
    if len(args.input) != len(params):
        print(f"{problem.name} takes {len(params)} inputs, got "
              f"{len(args.input)}", file=sys.stderr)
        return 2
    values = []
    for text, t in zip(args.input, params):
        e = parse_expr(text, t, {}, problem.registry)
        from .exprs import eval_expr
        values.append(eval_expr(e, {}, registry=problem.registry))
    try:
        out = program(tuple(values))
    except EvalSignal as sig:
        print(f"signal: {type(sig).__name__}", file=sys.stderr)
        return 1
    print(render(value_to_expr(out, problem.signature.ret)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="origami",
        description="evolve the typed gaps of recursion-scheme templates")
    sub = p.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("synth", help="solve one problem once")
    sp.add_argument("problem")
    _add_gp_args(sp)
    sp.set_defaults(fn=_cmd_synth)

    bp = sub.add_parser("bench", help="repeated runs with a report")
    bp.add_argument("problem")
    bp.add_argument("--runs", type=int, default=10)
    bp.add_argument("--out", help="report path (stdout when omitted)")
    bp.add_argument("--format", choices=("csv", "json"), default="csv")
    bp.add_argument("--parallel", type=int, default=1,
                    help="worker processes")
    bp.add_argument("--timing", action="store_true",
                    help="record wall clock seconds in the report")
    _add_gp_args(bp)
    bp.set_defaults(fn=_cmd_bench)

    lp = sub.add_parser("list-problems", help="problems and their routing")
    lp.set_defaults(fn=_cmd_list)

    vp = sub.add_parser("verify-fixtures",
                        help="check the reference genomes against oracles")
    vp.set_defaults(fn=_cmd_verify)

    ep = sub.add_parser("eval-genome", help="run a genome file on inputs")
    ep.add_argument("genome")
    ep.add_argument("input", nargs="*",
                    help="one literal per problem parameter")
    ep.set_defaults(fn=_cmd_eval)

    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except UnknownProblem as err:
        print(f"unknown problem: {err.args[0]}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
