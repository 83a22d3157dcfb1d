"""Hand-written reference genomes, one per template kind in active use.

These pin down template semantics end to end: each parses from the genome
file format, assembles, and reproduces its problem's oracle. The collatz
genome uses the shortened odd step (3n+1)/2, so its step counts differ from
the plain oracle; it is kept for its unfold-refold shape, not its scores.
"""
from __future__ import annotations

from .bench import Problem, parse_genome_text
from .exprs import DEFAULT_FUEL
from .schemes import DEFAULT_MAX_STEPS
from .synth import Genome
from .templates import Program, TemplateKind, assemble, build_template
from .values import Value

FIXTURES: dict[str, str] = {
    "count-odds": """\
problem: count-odds
template: cata-reduce
nil: 0
cons: (+ (mod x 2) xs)
""",
    "double-letters": """\
problem: double-letters
template: cata-map
nil: ""
cons: (if (== x '!') (<> "!!!" xs) (if (isLetter x) (cons x (cons x xs)) (cons x xs)))
""",
    "super-anagrams": """\
problem: super-anagrams
template: cata-fn
nil: true
cons: (&& (elem x ys) (xs (delete x ys)))
""",
    "for-loop-index": """\
problem: for-loop-index
template: ana
seed: arg0
stop: (== seed arg1)
elem: seed
next: (+ seed arg2)
""",
    "last-index-of-zero": """\
problem: last-index-of-zero
template: accu-index
init: 0
step: (+ s 1)
nil: -1
cons: (if (&& (== x 0) (== xs -1)) s xs)
""",
    "vector-average": """\
problem: vector-average
template: accu-combine
init: (pair 0.0 0.0)
step: (pair (+ s1 x) (+ s2 1.0))
nil: (/ s1 s2)
""",
    "collatz-numbers": """\
problem: collatz-numbers
template: hylo
seed: arg0
stop: (== seed 1)
elem: seed
next: (if (== (mod seed 2) 0) (div seed 2) (div (+ (* 3 seed) 1) 2))
nil: 1
cons: (+ 1 xs)
""",
}

# collatz diverges from the plain oracle past the fixed trace points
EXACT_FIXTURES = tuple(n for n in FIXTURES if n != "collatz-numbers")


def fixture_names() -> tuple[str, ...]:
    return tuple(FIXTURES)


def load_fixture(name: str) -> tuple[Problem, TemplateKind, Genome]:
    return parse_genome_text(FIXTURES[name])


def fixture_program(name: str, fuel: int = DEFAULT_FUEL,
                    max_steps: int = DEFAULT_MAX_STEPS) -> Program:
    problem, kind, genome = load_fixture(name)
    template = build_template(kind, problem.signature, problem.registry)
    return assemble(template, genome, fuel, max_steps, problem.registry)


def run_fixture(name: str, inputs: tuple) -> Value:
    return fixture_program(name)(inputs)
