"""Genetic programming over template slots.

The population is genomes, not programs: a genome carries one expression per
template slot plus the seed gene for unfolding templates. Variation operators
stay inside the slot's type and depth budget, so every individual assembles
into a well-typed Program by construction.
"""
from __future__ import annotations

import hashlib
import random
import time
from dataclasses import dataclass, replace

from .exprs import (
    ConstB, Expr, PrimApp, Var, children, depth, render, replace_subtree,
    typed_nodes,
)
from .primitives import BUILTIN_REGISTRY, Registry
from .templates import (
    Template, TemplateError, TemplateKind, assemble, build_template,
    candidate_template_kinds, constant_pool, default_expr, fixed_nil_slots,
    value_to_expr,
)
from .types import (
    BoolT, CharT, FloatT, FnOf, IntT, ListOf, SemType, TupleOf, apply_subst,
    is_ground, satisfies, subterms, type_depth, type_universe, type_vars,
    unify,
)
from .values import EvalSignal, Pair, Value

TRAIN_CASES = 100
VALID_CASES = 100

_CMP_OPS = ("==", "/=", "<", "<=", ">", ">=")


class UnconstructibleType(Exception):
    """No expression of the requested type can be built in the given scope."""


@dataclass(frozen=True)
class GPConfig:
    population_size: int = 1000
    max_generations: int = 300
    max_depth: int = 5
    tournament_size: int = 7
    crossover_rate: float = 0.8
    mutation_rate: float = 0.2
    nil_default_policy: bool = True
    fuel: int = 100_000
    max_steps: int = 10_000
    seed: int = 0
    penalty: float = 1e6
    time_limit_s: float = 300.0


@dataclass(frozen=True, eq=False)
class Genome:
    slot_exprs: dict[str, Expr]
    seed_gene: tuple | None = None

    def key(self) -> str:
        parts = [f"{n}={render(e)}" for n, e in sorted(self.slot_exprs.items())]
        if self.seed_gene is not None:
            tag, v = self.seed_gene
            parts.append(f"seed={tag}:{v!r}")
        return "; ".join(parts)


@dataclass(frozen=True)
class FitnessResult:
    errors: tuple[float, ...]
    total: float
    solved: bool
    wrong: int = 0
    size: int = 0

    @property
    def rank(self) -> tuple:
        # exact matches first, then error mass, then parsimony
        return (self.wrong, self.total, self.size)


def derive_seed(master: int, salt: str) -> int:
    h = hashlib.blake2b(f"{master}:{salt}".encode(), digest_size=8)
    return int.from_bytes(h.digest(), "big")


def error_value(expected: Value, actual: Value, rounding: int | None = None) -> float:
    """Mismatch distance between an expected and an actual value.

    Numbers contribute their absolute difference, booleans and characters a
    unit per mismatch, sequences compare per position with a flat charge for
    each missing or surplus element, pairs sum their components.
    """
    if isinstance(expected, bool) or isinstance(actual, bool):
        if isinstance(expected, bool) and isinstance(actual, bool):
            return 0.0 if expected == actual else 1.0
        return 1000.0
    if isinstance(expected, (int, float)) and isinstance(actual, (int, float)):
        if rounding is not None and isinstance(expected, float):
            return abs(round(expected, rounding) - round(actual, rounding))
        return abs(expected - actual)
    if isinstance(expected, str) and isinstance(actual, str):
        err = 1000.0 * abs(len(expected) - len(actual))
        for a, b in zip(expected, actual):
            if a != b:
                err += 1.0
        return err
    if isinstance(expected, tuple) and isinstance(actual, tuple):
        err = 1000.0 * abs(len(expected) - len(actual))
        for a, b in zip(expected, actual):
            err += error_value(a, b, rounding)
        return err
    if isinstance(expected, Pair) and isinstance(actual, Pair):
        return (error_value(expected.left, actual.left, rounding)
                + error_value(expected.right, actual.right, rounding))
    return 1000.0


def score_program(program, cases: list[tuple[tuple, Value]],
                  penalty: float = 1e6, rounding: int | None = None,
                  size: int = 0) -> FitnessResult:
    errors = []
    for inputs, expected in cases:
        try:
            out = program(inputs)
        except EvalSignal:
            errors.append(penalty)
            continue
        errors.append(error_value(expected, out, rounding))
    wrong = sum(1 for e in errors if e != 0)
    return FitnessResult(tuple(errors), sum(errors), wrong == 0, wrong, size)


def fitness(genome: Genome, template, cases: list[tuple[tuple, Value]],
            registry=None, fuel: int | None = None,
            max_steps: int | None = None, penalty: float = 1e6,
            rounding: int | None = None, validate: bool = True) -> FitnessResult:
    from .exprs import DEFAULT_FUEL, size as expr_size
    from .schemes import DEFAULT_MAX_STEPS
    from .templates import assemble
    program = assemble(template, genome,
                       fuel if fuel is not None else DEFAULT_FUEL,
                       max_steps if max_steps is not None else DEFAULT_MAX_STEPS,
                       registry, validate=validate)
    total_size = sum(expr_size(e) for e in genome.slot_exprs.values())
    return score_program(program, cases, penalty, rounding, total_size)


class GenCtx:
    """Cached generation vocabulary for one template: constant pools, the
    ground type universe, and which primitives can return each type."""

    def __init__(self, template: Template, registry: Registry | None = None):
        self.template = template
        self.registry = registry if registry is not None else BUILTIN_REGISTRY
        seen: dict[SemType, None] = dict.fromkeys(type_universe(template.signature))
        for slot in template.slots:
            for vt in slot.vars.values():
                for s in subterms(vt):
                    if is_ground(s) and not isinstance(s, FnOf):
                        seen.setdefault(s)
        self.universe: tuple[SemType, ...] = tuple(seen)
        # generation never targets types deeper than the signature needs
        self.depth_cap: int = max(
            2,
            max((type_depth(u) for u in seen), default=0),
            max((type_depth(s.return_type) for s in template.slots), default=0),
        )
        self._consts: dict[SemType, tuple[Expr, ...]] = {}
        self._prims: dict[SemType, tuple] = {}
        self._cands: dict[str | None, tuple[SemType, ...]] = {}

    def consts(self, t: SemType) -> tuple[Expr, ...]:
        if t not in self._consts:
            try:
                pool = constant_pool(t, self.registry)
                self._consts[t] = tuple(value_to_expr(v, t) for v in pool)
            except ValueError:
                self._consts[t] = ()
        return self._consts[t]

    def prims(self, t: SemType) -> tuple:
        if t not in self._prims:
            self._prims[t] = tuple(
                self.registry.primitives_returning(t, self.universe))
        return self._prims[t]

    def _var_candidates(self, constraint: str | None) -> tuple[SemType, ...]:
        if constraint not in self._cands:
            self._cands[constraint] = tuple(
                u for u in self.universe if satisfies(u, constraint))
        return self._cands[constraint]

    def terminals(self, t: SemType, vars: dict[str, SemType]) -> list[Expr]:
        # variables twice: in-scope data beats ephemeral constants
        vs: list[Expr] = [Var(n) for n, vt in vars.items() if vt == t]
        return vs + vs + list(self.consts(t))

    def _param_types(self, rng: random.Random, prim, subst: dict,
                     vars: dict[str, SemType]) -> list[SemType]:
        params = [apply_subst(p, subst) for p in prim.signature.params]
        free: list[str] = []
        for p in params:
            for name in sorted(type_vars(p)):
                if name not in free:
                    free.append(name)
        if free:
            scope: set[SemType] = set()
            for vt in vars.values():
                scope.update(s for s in subterms(vt) if is_ground(s))
            subst = dict(subst)
            for name in free:
                cands = self._var_candidates(prim.constraint_of(name))
                if not cands:
                    raise UnconstructibleType(f"no ground type for {name}")
                pref = tuple(c for c in cands if c in scope)
                subst[name] = rng.choice(pref * 3 + cands if pref else cands)
            params = [apply_subst(p, subst) for p in params]
        for p in params:
            if type_depth(p) > self.depth_cap:
                raise UnconstructibleType(f"{p} deeper than the signature uses")
        return params

    def rand(self, rng: random.Random, t: SemType, vars: dict[str, SemType],
             budget: int, full: bool) -> Expr:
        terms = self.terminals(t, vars)
        if budget <= 0:
            if terms:
                return rng.choice(terms)
            if isinstance(t, TupleOf):
                return self._op(rng, ("mktuple",), t, vars, 1, False)
            raise UnconstructibleType(f"no terminal of type {t}")
        ops: list[tuple] = [("prim", p, s) for p, s in self.prims(t)]
        ops.append(("if",))
        if isinstance(t, TupleOf):
            ops.append(("mktuple",))
        for name, vt in vars.items():
            if isinstance(vt, FnOf) and vt.ret == t:
                ops.append(("apply", name, vt.arg))
        if terms and not full and rng.random() < 0.3:
            return rng.choice(terms)
        if not ops:
            if terms:
                return rng.choice(terms)
            raise UnconstructibleType(f"no operation returns {t}")
        for _ in range(4):
            try:
                return self._op(rng, rng.choice(ops), t, vars, budget, full)
            except UnconstructibleType:
                continue
        if terms:
            return rng.choice(terms)
        if isinstance(t, TupleOf):
            return self._op(rng, ("mktuple",), t, vars, budget, full)
        raise UnconstructibleType(f"could not build an expression of type {t}")

    def _op(self, rng: random.Random, op: tuple, t: SemType,
            vars: dict[str, SemType], budget: int, full: bool) -> Expr:
        match op[0]:
            case "prim":
                prim, subst = op[1], op[2]
                params = self._param_types(rng, prim, subst, vars)
                args = tuple(self.rand(rng, p, vars, budget - 1, full)
                             for p in params)
                return PrimApp(prim.id, args)
            case "if":
                from .exprs import If
                return If(self.rand(rng, BoolT, vars, budget - 1, full),
                          self.rand(rng, t, vars, budget - 1, full),
                          self.rand(rng, t, vars, budget - 1, full))
            case "mktuple":
                from .exprs import MkTuple
                return MkTuple(self.rand(rng, t.left, vars, budget - 1, full),
                               self.rand(rng, t.right, vars, budget - 1, full))
            case "apply":
                from .exprs import Apply
                return Apply(Var(op[1]), self.rand(rng, op[2], vars, budget - 1, full))
        raise AssertionError(op)


def random_expr(rng: random.Random, target: SemType, vars: dict[str, SemType],
                max_depth: int, ctx: GenCtx, full: bool = False) -> Expr:
    return ctx.rand(rng, target, vars, max_depth, full)


def random_pred(rng: random.Random, vars: dict[str, SemType], budget: int,
                ctx: GenCtx) -> Expr:
    """A stop predicate from the restricted grammar: scalar comparisons,
    emptiness tests, and boolean connectives only."""
    scalars = [(n, t) for n, t in vars.items() if t in (IntT, FloatT, CharT)]
    bools = [n for n, t in vars.items() if t == BoolT]
    lists = [(n, t) for n, t in vars.items() if isinstance(t, ListOf)]

    def atom() -> Expr:
        kinds = []
        if scalars:
            kinds.append("cmp")
        if bools:
            kinds.append("bool")
        if lists:
            kinds.append("null")
        if not kinds:
            return ConstB(rng.random() < 0.5)
        match rng.choice(kinds):
            case "cmp":
                name, t = rng.choice(scalars)
                others: list[Expr] = [Var(n) for n, vt in vars.items()
                                      if vt == t and n != name]
                others.extend(ctx.consts(t))
                if not others:
                    others = [Var(name)]
                return PrimApp(rng.choice(_CMP_OPS),
                               (Var(name), rng.choice(others)))
            case "bool":
                v: Expr = Var(rng.choice(bools))
                return PrimApp("not", (v,)) if rng.random() < 0.3 else v
            case "null":
                return PrimApp("null", (Var(rng.choice(lists)[0]),))
        raise AssertionError

    if budget <= 0 or rng.random() < 0.5:
        return atom()
    match rng.choice(("&&", "||", "not", "atom")):
        case "not":
            return PrimApp("not", (random_pred(rng, vars, budget - 1, ctx),))
        case "atom":
            return atom()
        case op:
            return PrimApp(op, (random_pred(rng, vars, budget - 1, ctx),
                                random_pred(rng, vars, budget - 1, ctx)))
    raise AssertionError


_PRED_DEPTH = 3
_DEPTH_RAMP = (1, 2, 2, 3, 3, 4, 5)


def _ramp_depth(rng: random.Random, max_depth: int) -> int:
    choices = tuple(d for d in _DEPTH_RAMP if d <= max_depth)
    return rng.choice(choices) if choices else max_depth


def random_genome(rng: random.Random, template: Template, config: GPConfig,
                  ctx: GenCtx) -> Genome:
    """Ramped half-and-half biased shallow: each slot draws a depth budget
    and a grow or full shape; nil slots take their type default when the
    policy pins them."""
    fixed = fixed_nil_slots(template, config.nil_default_policy)
    slots: dict[str, Expr] = {}
    for slot in template.slots:
        if slot.name in fixed:
            slots[slot.name] = default_expr(slot.return_type)
        elif slot.restricted:
            d = rng.randint(1, min(_PRED_DEPTH, config.max_depth))
            slots[slot.name] = random_pred(rng, slot.vars, d, ctx)
        else:
            d = _ramp_depth(rng, config.max_depth)
            full = rng.random() < 0.5
            slots[slot.name] = ctx.rand(rng, slot.return_type, slot.vars, d, full)
    gene = None
    if template.seed_gene_domain is not None:
        gene = rng.choice(template.seed_gene_domain)
    return Genome(slots, gene)


def _variation_targets(template: Template, config: GPConfig) -> list[str]:
    fixed = fixed_nil_slots(template, config.nil_default_policy)
    targets = [s.name for s in template.slots if s.name not in fixed]
    if template.seed_gene_domain is not None:
        targets.append("@seed")
    return targets


def _same_shape_prims(ctx: GenCtx, t: SemType, arg_ts: list[SemType],
                      current: str) -> list[str]:
    """Primitive ids that accept exactly these argument types and return t."""
    out = []
    for p, s in ctx.prims(t):
        if p.id == current or len(p.signature.params) != len(arg_ts):
            continue
        subst: dict | None = dict(s)
        for param, at in zip(p.signature.params, arg_ts):
            subst = unify(apply_subst(param, subst), at, subst)
            if subst is None:
                break
        if subst is None:
            continue
        if all(satisfies(subst[v], c) for v, c in p.constraints if v in subst):
            out.append(p.id)
    return out


def _point_mutate(rng: random.Random, expr: Expr, slot, ctx: GenCtx) -> Expr | None:
    """Swap one node in place: a primitive for a same-shape primitive, or a
    leaf for another terminal of its type. Children are kept."""
    nodes = typed_nodes(expr, slot.vars, ctx.registry)
    by_path = {path: t for path, _n, t in nodes}
    for i in rng.sample(range(len(nodes)), min(len(nodes), 6)):
        path, node, t = nodes[i]
        if isinstance(node, PrimApp) and node.args:
            arg_ts = [by_path[path + (j,)] for j in range(len(node.args))]
            cands = _same_shape_prims(ctx, t, arg_ts, node.prim_id)
            if cands:
                swapped = PrimApp(rng.choice(cands), node.args)
                return replace_subtree(expr, path, swapped)
        elif not children(node):
            terms = [e for e in ctx.terminals(t, slot.vars) if e != node]
            if terms:
                return replace_subtree(expr, path, rng.choice(terms))
    return None


def _hoist_mutate(rng: random.Random, expr: Expr, slot, ctx: GenCtx) -> Expr | None:
    """Replace an internal node by one of its same-typed proper descendants."""
    nodes = typed_nodes(expr, slot.vars, ctx.registry)
    internal = [(path, t) for path, n, t in nodes if children(n)]
    rng.shuffle(internal)
    for path, t in internal[:4]:
        k = len(path)
        descs = [n for p2, n, t2 in nodes
                 if len(p2) > k and p2[:k] == path and t2 == t]
        if descs:
            return replace_subtree(expr, path, rng.choice(descs))
    return None


# relative weights of the in-slot operators: grow new material, nudge one
# node, or shrink by promoting a subexpression
_MUT_POINT = 0.25
_MUT_HOIST = 0.20


def mutate(rng: random.Random, genome: Genome, template: Template,
           config: GPConfig, ctx: GenCtx) -> Genome:
    """Mutate one variation target: redraw the seed gene, redraw a restricted
    slot, or apply a subtree/point/hoist operator inside one slot."""
    target = rng.choice(_variation_targets(template, config))
    if target == "@seed":
        return replace(genome, seed_gene=rng.choice(template.seed_gene_domain))
    slot = template.slot(target)
    expr = genome.slot_exprs[target]
    roll = rng.random()
    if roll < _MUT_POINT:
        new = _point_mutate(rng, expr, slot, ctx)
        if new is not None:
            return replace(genome, slot_exprs={**genome.slot_exprs, target: new})
    elif roll < _MUT_POINT + _MUT_HOIST:
        new = _hoist_mutate(rng, expr, slot, ctx)
        if new is not None:
            return replace(genome, slot_exprs={**genome.slot_exprs, target: new})
    if slot.restricted:
        d = rng.randint(1, min(_PRED_DEPTH, config.max_depth))
        new = random_pred(rng, slot.vars, d, ctx)
        return replace(genome, slot_exprs={**genome.slot_exprs, target: new})
    nodes = typed_nodes(expr, slot.vars, ctx.registry)
    for _ in range(5):
        path, _node, t = rng.choice(nodes)
        budget = max(0, config.max_depth - len(path))
        try:
            sub = ctx.rand(rng, t, slot.vars, budget, full=False)
        except UnconstructibleType:
            continue
        new = replace_subtree(expr, path, sub)
        # tuple closure can overhang the budget by a level or two; never let
        # that drift compound across generations
        if depth(new) > config.max_depth + 2:
            continue
        return replace(genome, slot_exprs={**genome.slot_exprs, target: new})
    try:
        new = ctx.rand(rng, slot.return_type, slot.vars,
                       _ramp_depth(rng, config.max_depth), full=False)
    except UnconstructibleType:
        return genome
    return replace(genome, slot_exprs={**genome.slot_exprs, target: new})


def _pick_node(rng: random.Random, nodes: list) -> tuple:
    # Koza bias: swap points land on internal nodes most of the time, so
    # crossover trades building blocks rather than renaming leaves
    internal = [n for n in nodes if children(n[1])]
    if internal and rng.random() < 0.9:
        return rng.choice(internal)
    return rng.choice(nodes)


def crossover(rng: random.Random, a: Genome, b: Genome, template: Template,
              config: GPConfig, ctx: GenCtx) -> Genome:
    """One child: swap a type- and depth-compatible subtree of one slot of
    `a` for a donor subtree from the same slot of `b`. Restricted slots trade
    boolean nodes only, so predicates stay in their grammar."""
    target = rng.choice(_variation_targets(template, config))
    if target == "@seed":
        return replace(a, seed_gene=b.seed_gene)
    slot = template.slot(target)
    ea, eb = a.slot_exprs[target], b.slot_exprs[target]
    nodes_a = typed_nodes(ea, slot.vars, ctx.registry)
    nodes_b = typed_nodes(eb, slot.vars, ctx.registry)
    if slot.restricted:
        nodes_a = [n for n in nodes_a if n[2] == BoolT]
        nodes_b = [n for n in nodes_b if n[2] == BoolT]
    if not nodes_a or not nodes_b:
        return a
    for _ in range(5):
        path, _node, t = _pick_node(rng, nodes_a)
        donors = [n for n in nodes_b
                  if n[2] == t and len(path) + depth(n[1]) <= config.max_depth]
        if not donors:
            continue
        sub = _pick_node(rng, donors)[1]
        new = replace_subtree(ea, path, sub)
        return replace(a, slot_exprs={**a.slot_exprs, target: new})
    return a


def tournament(rng: random.Random, pop: list[Genome],
               fits: list[FitnessResult], k: int) -> Genome:
    best = rng.randrange(len(pop))
    for _ in range(k - 1):
        i = rng.randrange(len(pop))
        if fits[i].rank < fits[best].rank:
            best = i
    return pop[best]


@dataclass
class EvolveResult:
    genome: Genome
    solved: bool
    generations: int
    seconds: float
    template: Template


class _Run:
    """One population evolving against one template; stepped a generation at
    a time so several templates can race in lockstep."""

    def __init__(self, problem, template: Template, config: GPConfig,
                 rng: random.Random, train: list, valid: list):
        self.problem = problem
        self.template = template
        self.config = config
        self.rng = rng
        self.train = train
        self.valid = valid
        self.ctx = GenCtx(template, problem.registry)
        self.cache: dict[str, FitnessResult] = {}
        self.deadline: float | None = None
        self.generation = 0
        self.solved_genome: Genome | None = None
        self.pop: list[Genome] = []
        self.fits: list[FitnessResult] = []
        for _ in range(config.population_size):
            g = random_genome(rng, template, config, self.ctx)
            f = self._eval(g)
            self.pop.append(g)
            self.fits.append(f)
            if f.solved and self.solved_genome is None and self._validate(g):
                self.solved_genome = g
        self.best = min(range(len(self.pop)), key=lambda i: self.fits[i].rank)

    def _eval(self, g: Genome) -> FitnessResult:
        k = g.key()
        hit = self.cache.get(k)
        if hit is not None:
            return hit
        f = fitness(g, self.template, self.train, self.problem.registry,
                    self.config.fuel, self.config.max_steps,
                    self.config.penalty, self.problem.rounding, validate=False)
        self.cache[k] = f
        return f

    def _validate(self, g: Genome) -> bool:
        return fitness(g, self.template, self.valid, self.problem.registry,
                       self.config.fuel, self.config.max_steps,
                       self.config.penalty, self.problem.rounding).solved

    def best_fitness(self) -> FitnessResult:
        return self.fits[self.best]

    def step(self) -> bool:
        """Advance one generation. Returns True on a train and validation
        solve, which may land mid-generation."""
        if self.solved_genome is not None:
            return True
        cfg = self.config
        rng = self.rng
        new_pop = [self.pop[self.best]]
        new_fits = [self.fits[self.best]]
        while len(new_pop) < cfg.population_size:
            if rng.random() < cfg.crossover_rate:
                a = tournament(rng, self.pop, self.fits, cfg.tournament_size)
                b = tournament(rng, self.pop, self.fits, cfg.tournament_size)
                child = crossover(rng, a, b, self.template, cfg, self.ctx)
            else:
                a = tournament(rng, self.pop, self.fits, cfg.tournament_size)
                child = mutate(rng, a, self.template, cfg, self.ctx)
            if child.key() in self.cache:
                # already seen: push the clone further instead of re-scoring it
                child = mutate(rng, child, self.template, cfg, self.ctx)
            f = self._eval(child)
            new_pop.append(child)
            new_fits.append(f)
            if f.solved and self._validate(child):
                self.solved_genome = child
                break
            if self.deadline is not None and time.perf_counter() > self.deadline:
                break
        self.pop = new_pop
        self.fits = new_fits
        self.best = min(range(len(self.pop)), key=lambda i: self.fits[i].rank)
        self.generation += 1
        return self.solved_genome is not None


def _problem_cases(problem, config: GPConfig) -> tuple[list, list]:
    train = problem.cases(TRAIN_CASES, random.Random(derive_seed(config.seed, "train")))
    valid = problem.cases(VALID_CASES, random.Random(derive_seed(config.seed, "valid")))
    return train, valid


def evolve(problem, template: Template, config: GPConfig,
           cases: tuple[list, list] | None = None) -> EvolveResult:
    """Evolve one template to the generation budget, the time limit, or a
    solve, whichever lands first."""
    start = time.perf_counter()
    train, valid = cases if cases is not None else _problem_cases(problem, config)
    rng = random.Random(derive_seed(config.seed, f"gp:{template.kind.value}"))
    run = _Run(problem, template, config, rng, train, valid)
    run.deadline = start + config.time_limit_s
    while (run.solved_genome is None
           and run.generation < config.max_generations
           and time.perf_counter() < run.deadline):
        run.step()
    solved = run.solved_genome is not None
    best = run.solved_genome if solved else run.pop[run.best]
    return EvolveResult(best, solved, run.generation,
                        time.perf_counter() - start, template)


def solve(problem, config: GPConfig,
          template_kind: TemplateKind | None = None,
          template_kinds: tuple[TemplateKind, ...] | None = None) -> EvolveResult:
    """Race the routed template kinds in lockstep, splitting the generation
    budget evenly; a forced kind gets the whole budget."""
    start = time.perf_counter()
    sig = problem.signature
    forced = template_kind is not None or template_kinds is not None
    if template_kind is not None:
        kinds: tuple[TemplateKind, ...] = (template_kind,)
    elif template_kinds is not None:
        kinds = template_kinds
    else:
        kinds = candidate_template_kinds(sig) or tuple(TemplateKind)
    templates = []
    for kind in kinds:
        try:
            templates.append(build_template(kind, sig, problem.registry))
        except TemplateError:
            if forced:
                raise
    if not templates:
        raise TemplateError(f"no template fits {problem.name}")
    cases = _problem_cases(problem, config)
    budget = max(1, config.max_generations // len(templates))
    deadline = start + config.time_limit_s
    runs = []
    winner: _Run | None = None
    for template in templates:
        rng = random.Random(derive_seed(config.seed, f"gp:{template.kind.value}"))
        run = _Run(problem, template, config, rng, *cases)
        run.deadline = deadline
        runs.append(run)
        if run.solved_genome is not None and winner is None:
            winner = run
    while winner is None:
        live = [r for r in runs if r.generation < budget]
        if not live or time.perf_counter() > deadline:
            break
        for run in live:
            if run.step():
                winner = run
                break
            if time.perf_counter() > deadline:
                break
    if winner is not None:
        return EvolveResult(winner.solved_genome, True, winner.generation,
                            time.perf_counter() - start, winner.template)
    best = min(runs, key=lambda r: r.best_fitness().rank)
    return EvolveResult(best.pop[best.best], False,
                        max(r.generation for r in runs),
                        time.perf_counter() - start, best.template)
