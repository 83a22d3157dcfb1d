"""Benchmark problems and the run harness.

Each problem bundles a signature, a ground-truth oracle, a case generator,
and edge cases that always lead the case list. Reports serialize to CSV or
JSON; identical seeds and configs produce byte-identical report files.
"""
from __future__ import annotations

import csv
import io
import json
import os
import random
import re
import string
from collections import Counter
from dataclasses import dataclass, replace
from typing import Callable

from .exprs import Expr, parse_expr, render
from .primitives import Registry, UnknownProblem, is_vowel, scrabble_score
from .synth import Genome, GPConfig, derive_seed, solve
from .templates import (
    Template, TemplateKind, build_template, template_kind_from_label,
    value_to_expr,
)
from .types import Signature, parse_signature
from .values import Pair, Value


@dataclass(frozen=True)
class Problem:
    name: str
    signature: Signature
    oracle_fn: Callable[..., Value]
    generator: Callable[[random.Random, int], tuple]
    edge_cases: tuple[tuple, ...] = ()
    rounding: int | None = None

    @property
    def registry(self) -> Registry:
        return Registry.for_problem(self.name)

    def cases(self, n: int, rng: random.Random) -> list[tuple[tuple, Value]]:
        return generate_cases(self, n, rng)


def oracle(problem: Problem, inputs: tuple) -> Value:
    return problem.oracle_fn(*inputs)


def generate_cases(problem: Problem, n: int,
                   rng: random.Random) -> list[tuple[tuple, Value]]:
    """Edge cases first, then generated inputs: mostly short, with every
    fifth case drawn at full length."""
    cases: list[tuple[tuple, Value]] = []
    for inputs in problem.edge_cases[:n]:
        cases.append((inputs, problem.oracle_fn(*inputs)))
    i = 0
    while len(cases) < n:
        inputs = problem.generator(rng, i)
        cases.append((inputs, problem.oracle_fn(*inputs)))
        i += 1
    return cases


def _case_len(rng: random.Random, i: int, short: int = 12, long: int = 25,
              lo: int = 0) -> int:
    if i % 5 == 4:
        return rng.randint(lo, long)
    return lo + int(rng.random() ** 2 * short)


def _int_list(rng: random.Random, i: int, lo: int = 0) -> tuple[int, ...]:
    return tuple(rng.randint(-1000, 1000) for _ in range(_case_len(rng, i, lo=lo)))


def _word(rng: random.Random, n: int, alphabet: str) -> str:
    return "".join(rng.choice(alphabet) for _ in range(n))


# oracles

def _count_odds(xs: tuple) -> int:
    return sum(1 for v in xs if v % 2 != 0)


def _double_letters(s: str) -> str:
    out = []
    for c in s:
        if c == "!":
            out.append("!!!")
        elif c.isalpha():
            out.append(c + c)
        else:
            out.append(c)
    return "".join(out)


def _negative_to_zero(xs: tuple) -> tuple:
    return tuple(v if v >= 0 else 0 for v in xs)


def _replace_space(s: str) -> Pair:
    return Pair(s.replace(" ", "\n"), sum(1 for c in s if c != " "))


def _scrabble(s: str) -> int:
    return sum(scrabble_score(c) for c in s)


def _string_lengths_backwards(xs: tuple) -> tuple:
    return tuple(len(s) for s in reversed(xs))


def _syllables(s: str) -> int:
    return sum(1 for c in s if is_vowel(c))


def _last_index_of_zero(xs: tuple) -> int:
    return max(i for i, v in enumerate(xs) if v == 0)


def _vector_average(xs: tuple) -> float:
    return sum(xs) / len(xs)


def _checksum(s: str) -> str:
    return chr(sum(ord(c) for c in s) % 64 + ord(" "))


def _for_loop_index(start: int, end: int, step: int) -> tuple:
    return tuple(range(start, end, step))


def _collatz(n: int) -> int:
    count = 1
    while n != 1:
        n = n // 2 if n % 2 == 0 else 3 * n + 1
        count += 1
    return count


def _super_anagrams(x: str, y: str) -> bool:
    return not (Counter(x) - Counter(y))


# generators

_LETTER_BANG = string.ascii_letters + "!!! .,:13"
_VOWELISH = string.ascii_lowercase + "aeiouy "
_SPACEY = string.ascii_lowercase + "    "


def _gen_count_odds(rng, i):
    return (_int_list(rng, i),)


def _gen_double_letters(rng, i):
    return (_word(rng, _case_len(rng, i), _LETTER_BANG),)


def _gen_negative_to_zero(rng, i):
    return (_int_list(rng, i),)


def _gen_replace_space(rng, i):
    return (_word(rng, _case_len(rng, i), _SPACEY),)


def _gen_scrabble(rng, i):
    return (_word(rng, _case_len(rng, i), string.ascii_letters + "  .,"),)


def _gen_slb(rng, i):
    n = _case_len(rng, i, short=6, long=12)
    return (tuple(_word(rng, rng.randint(0, 10), string.ascii_lowercase)
                  for _ in range(n)),)


def _gen_syllables(rng, i):
    return (_word(rng, _case_len(rng, i), _VOWELISH),)


def _gen_last_index_of_zero(rng, i):
    n = _case_len(rng, i, lo=1)
    xs = [0 if rng.random() < 0.2 else rng.randint(-50, 50) for _ in range(n)]
    xs[rng.randrange(n)] = 0
    return (tuple(xs),)


def _gen_vector_average(rng, i):
    n = _case_len(rng, i, lo=1)
    return (tuple(rng.uniform(-100.0, 100.0) for _ in range(n)),)


def _gen_checksum(rng, i):
    return (_word(rng, _case_len(rng, i),
                  "".join(chr(c) for c in range(32, 127))),)


def _gen_for_loop_index(rng, i):
    start = rng.randint(-500, 500)
    step = rng.randint(1, 10)
    end = start + step * rng.randint(1, 20)
    return (start, end, step)


def _gen_collatz(rng, i):
    return (rng.randint(1, 1000),)


def _gen_super_anagrams(rng, i):
    y = _word(rng, _case_len(rng, i, short=8, long=12), "abcdefg")
    if i % 2 == 0:
        chars = list(y)
        rng.shuffle(chars)
        x = "".join(chars[:rng.randint(0, len(chars))])
    else:
        x = _word(rng, _case_len(rng, i, short=8, long=12), "abcdefg")
    return (x, y)


_PROBLEMS: dict[str, Problem] = {}


def _problem(name: str, sig: str, oracle_fn, generator, edges: tuple,
             rounding: int | None = None) -> None:
    _PROBLEMS[name] = Problem(name, parse_signature(sig), oracle_fn,
                              generator, edges, rounding)


_problem("count-odds", "[Int] -> Int", _count_odds, _gen_count_odds,
         (((),), ((0,),), ((0, 0, 0),), ((1,),)))
_problem("double-letters", "[Char] -> [Char]", _double_letters,
         _gen_double_letters, (("",), ("!",), ("a",), ("a!",)))
_problem("negative-to-zero", "[Int] -> [Int]", _negative_to_zero,
         _gen_negative_to_zero, (((),), ((-1,),), ((0, 0),)))
_problem("replace-space-with-newline", "[Char] -> ([Char], Int)",
         _replace_space, _gen_replace_space, (("",), (" ",), ("a",)))
_problem("scrabble-score", "[Char] -> Int", _scrabble, _gen_scrabble,
         (("",), ("a",), ("Z",)))
_problem("string-lengths-backwards", "[[Char]] -> [Int]",
         _string_lengths_backwards, _gen_slb, (((),), (("",),), (("abc", ""),)))
_problem("syllables", "[Char] -> Int", _syllables, _gen_syllables,
         (("",), ("a",), ("y",), ("b",)))
_problem("last-index-of-zero", "[Int] -> Int", _last_index_of_zero,
         _gen_last_index_of_zero, (((0,),), ((0, 0, 0),), ((1, 0),), ((0, 1),)))
_problem("vector-average", "[Float] -> Float", _vector_average,
         _gen_vector_average, (((0.0,),), ((0.0, 0.0, 0.0),), ((1.0,),)),
         rounding=4)
_problem("checksum", "[Char] -> Char", _checksum, _gen_checksum,
         (("",), (" ",), ("a",)))
_problem("for-loop-index", "Int -> Int -> Int -> [Int]",
         _for_loop_index, _gen_for_loop_index, ((0, 1, 1), (0, 6, 2)))
_problem("collatz-numbers", "Int -> Int", _collatz, _gen_collatz,
         ((1,), (2,), (6,)))
_problem("super-anagrams", "[Char] -> [Char] -> Bool", _super_anagrams,
         _gen_super_anagrams, (("", ""), ("a", "a"), ("a", ""), ("ab", "bca"),
                               ("aa", "a")))


def registry() -> dict[str, Problem]:
    return dict(_PROBLEMS)


def get_problem(name: str) -> Problem:
    try:
        return _PROBLEMS[name]
    except KeyError:
        raise UnknownProblem(name) from None


@dataclass(frozen=True)
class RunResult:
    problem: str
    seed: int
    solved: bool
    generations: int
    seconds: float
    template: str
    genome: Genome


@dataclass(frozen=True)
class RunReport:
    problem: str
    runs: tuple[RunResult, ...]

    @property
    def solved_count(self) -> int:
        return sum(1 for r in self.runs if r.solved)


def _run_one(name: str, config: GPConfig, kind_label: str | None) -> RunResult:
    problem = get_problem(name)
    kind = template_kind_from_label(kind_label) if kind_label else None
    res = solve(problem, config, kind)
    return RunResult(name, config.seed, res.solved, res.generations,
                     res.seconds, res.template.kind.value, res.genome)


def run_benchmark(problem: Problem | str, runs: int, config: GPConfig,
                  template_kind: TemplateKind | None = None,
                  parallel: int = 1) -> RunReport:
    """Independent solve attempts under per-run seeds derived from the master
    seed; results do not depend on the degree of parallelism."""
    name = problem if isinstance(problem, str) else problem.name
    get_problem(name)
    kind_label = template_kind.value if template_kind else None
    configs = [replace(config, seed=derive_seed(config.seed, f"run:{i}"))
               for i in range(runs)]
    if parallel > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(_run_one, [name] * runs, configs,
                                    [kind_label] * runs))
    else:
        results = [_run_one(name, c, kind_label) for c in configs]
    return RunReport(name, tuple(results))


def _atomic_write(path: str, data: str) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w") as f:
        f.write(data)
    os.replace(tmp, path)


def report_csv(report: RunReport, with_timing: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["problem", "seed", "solved", "generations", "seconds"])
    for r in report.runs:
        w.writerow([r.problem, r.seed, "true" if r.solved else "false",
                    r.generations, f"{r.seconds:.3f}" if with_timing else "0.000"])
    return buf.getvalue()


def write_csv(report: RunReport, path: str, with_timing: bool = False) -> None:
    _atomic_write(path, report_csv(report, with_timing))


def report_json(report: RunReport, with_timing: bool = False) -> str:
    doc = {
        "problem": report.problem,
        "solved": report.solved_count,
        "runs": [{
            "problem": r.problem,
            "seed": r.seed,
            "solved": r.solved,
            "generations": r.generations,
            "seconds": round(r.seconds, 3) if with_timing else 0.0,
            "template": r.template,
            "genome": {n: render(e) for n, e in sorted(r.genome.slot_exprs.items())},
        } for r in report.runs],
    }
    return json.dumps(doc, indent=2) + "\n"


def write_json(report: RunReport, path: str, with_timing: bool = False) -> None:
    _atomic_write(path, report_json(report, with_timing))


def format_genome(problem: str, kind: TemplateKind, genome: Genome) -> str:
    """Genome file format: a problem line, a template line, the seed gene for
    unfolding templates, then one line per slot."""
    lines = [f"problem: {problem}", f"template: {kind.value}"]
    if genome.seed_gene is not None:
        tag, v = genome.seed_gene
        if tag == "arg":
            text = f"arg{v}"
        else:
            text = render(value_to_expr(v, _seed_type(problem, kind)))
        lines.append(f"seed: {text}")
    for name in _slot_order(problem, kind):
        lines.append(f"{name}: {render(genome.slot_exprs[name])}")
    return "\n".join(lines) + "\n"


def _template_for(problem: str, kind: TemplateKind) -> Template:
    p = get_problem(problem)
    return build_template(kind, p.signature, p.registry)


def _seed_type(problem: str, kind: TemplateKind):
    return _template_for(problem, kind).seed_type


def _slot_order(problem: str, kind: TemplateKind) -> tuple[str, ...]:
    return _template_for(problem, kind).slot_names()


_ARG_RE = re.compile(r"^arg(\d+)$")


def parse_genome_text(text: str) -> tuple[Problem, TemplateKind, Genome]:
    fields: dict[str, str] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition(":")
        fields[key.strip()] = value.strip()
    problem = get_problem(fields.pop("problem"))
    kind = template_kind_from_label(fields.pop("template"))
    template = build_template(kind, problem.signature, problem.registry)
    gene = None
    if "seed" in fields:
        raw = fields.pop("seed")
        m = _ARG_RE.match(raw)
        if m:
            gene = ("arg", int(m.group(1)))
        else:
            e = parse_expr(raw, template.seed_type, {}, problem.registry)
            gene = ("const", _const_value(e))
    slots: dict[str, Expr] = {}
    for slot in template.slots:
        slots[slot.name] = parse_expr(fields.pop(slot.name), slot.return_type,
                                      slot.vars, problem.registry)
    # synth prints run metadata alongside the genome; tolerate it so its
    # output feeds eval-genome unedited
    for meta in ("solved", "generations", "seconds"):
        fields.pop(meta, None)
    if fields:
        raise ValueError(f"unexpected genome fields: {sorted(fields)}")
    return problem, kind, Genome(slots, gene)


def _const_value(e: Expr) -> Value:
    from .exprs import _static_const
    folded = _static_const(e)
    if folded is None:
        raise ValueError("seed gene must be a constant or an argument")
    return folded[0]


def load_problem_spec(path: str) -> Problem:
    """A problem description file names its oracle out of the registry:

        name: my-count-odds
        signature: [Int] -> Int
        oracle: count-odds
    """
    fields: dict[str, str] = {}
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition(":")
            fields[key.strip()] = value.strip()
    base = get_problem(fields["oracle"])
    sig = parse_signature(fields["signature"]) if "signature" in fields \
        else base.signature
    return replace(base, name=fields.get("name", base.name), signature=sig)
