"""Recursion-scheme templates: signature routing, slot structure, assembly.

A template fixes everything about a program except its typed gaps (slots).
Assembling a genome (one well-typed expression per slot, plus a seed gene for
the unfolding templates) yields a pure Program implementing exactly the
problem signature.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .exprs import (
    ConstB, ConstC, ConstF, ConstI, ConstL, Expr, ExprTypeError, MkTuple, Var,
    compile_expr, typecheck,
)
from .primitives import BUILTIN_REGISTRY, Registry
from .schemes import (
    DEFAULT_MAX_STEPS, accu_c, ana_c, cata_c, cata_fn_c, hylo_c,
)
from .exprs import DEFAULT_FUEL
from .types import (
    BoolT, CharT, FloatT, IntT, FnOf, ListOf, SemType, Signature, TupleOf,
    show_signature, show_type, subterms,
)
from .values import Diverged, Pair, Value, value_conforms


class SchemeKind(Enum):
    CATA = "cata"
    ANA = "ana"
    HYLO = "hylo"
    ACCU = "accu"


class TemplateKind(Enum):
    CATA_REDUCE = "cata-reduce"
    CATA_MAP = "cata-map"
    CATA_FN = "cata-fn"
    CATA_TUPLE = "cata-tuple"
    ANA_STD = "ana"
    HYLO_STD = "hylo"
    ACCU_INDEX = "accu-index"
    ACCU_COMBINE = "accu-combine"

    @property
    def scheme(self) -> SchemeKind:
        return _KIND_SCHEME[self]

    @property
    def label(self) -> str:
        return self.value


_KIND_SCHEME = {
    TemplateKind.CATA_REDUCE: SchemeKind.CATA,
    TemplateKind.CATA_MAP: SchemeKind.CATA,
    TemplateKind.CATA_FN: SchemeKind.CATA,
    TemplateKind.CATA_TUPLE: SchemeKind.CATA,
    TemplateKind.ANA_STD: SchemeKind.ANA,
    TemplateKind.HYLO_STD: SchemeKind.HYLO,
    TemplateKind.ACCU_INDEX: SchemeKind.ACCU,
    TemplateKind.ACCU_COMBINE: SchemeKind.ACCU,
}

CATA_FAMILY = (TemplateKind.CATA_REDUCE, TemplateKind.CATA_MAP,
               TemplateKind.CATA_FN, TemplateKind.CATA_TUPLE)


def template_kind_from_label(label: str) -> TemplateKind:
    for k in TemplateKind:
        if k.value == label:
            return k
    raise ValueError(f"unknown template kind {label!r}")


@dataclass(frozen=True)
class Slot:
    name: str
    return_type: SemType
    vars: dict[str, SemType]
    role: str
    restricted: bool = False  # stop predicates: comparison/logical grammar only


@dataclass(frozen=True)
class Template:
    kind: TemplateKind
    slots: tuple[Slot, ...]
    signature: Signature
    seed_gene_domain: tuple[tuple, ...] | None = None  # ("arg", i) | ("const", v)
    consumed_index: int | None = None  # which param the fold walks
    fn_list_index: int | None = None   # CataFn: the list the FnV result takes
    seed_type: SemType | None = None
    elem_type: SemType | None = None   # folded or emitted element type

    def slot(self, name: str) -> Slot:
        for s in self.slots:
            if s.name == name:
                return s
        raise KeyError(name)

    def slot_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.slots)


class TemplateError(Exception):
    pass


class AssembleError(Exception):
    pass


def candidate_schemes(sig: Signature) -> tuple[SchemeKind, ...]:
    """Signature-shape routing: a list parameter folds (cata/accu); building a
    list from scalars unfolds (ana); scalar to scalar goes through hylo."""
    if not sig.params:
        return ()
    if any(isinstance(p, ListOf) for p in sig.params):
        return (SchemeKind.CATA, SchemeKind.ACCU)
    if isinstance(sig.ret, ListOf):
        return (SchemeKind.ANA,)
    return (SchemeKind.HYLO,)


def _cata_kind_for(sig: Signature) -> TemplateKind:
    if isinstance(sig.ret, TupleOf):
        return TemplateKind.CATA_TUPLE
    if isinstance(sig.ret, ListOf):
        return TemplateKind.CATA_MAP
    consumed = _first_list_param(sig)
    for j in range(consumed + 1, len(sig.params)):
        if sig.params[j] == sig.params[consumed]:
            return TemplateKind.CATA_FN
    return TemplateKind.CATA_REDUCE


def candidate_template_kinds(sig: Signature) -> tuple[TemplateKind, ...]:
    """Concrete template kinds to race, in routing order."""
    kinds: list[TemplateKind] = []
    for scheme in candidate_schemes(sig):
        match scheme:
            case SchemeKind.CATA:
                kinds.append(_cata_kind_for(sig))
            case SchemeKind.ANA:
                kinds.append(TemplateKind.ANA_STD)
            case SchemeKind.HYLO:
                kinds.append(TemplateKind.HYLO_STD)
            case SchemeKind.ACCU:
                kinds.extend((TemplateKind.ACCU_INDEX, TemplateKind.ACCU_COMBINE))
    return tuple(kinds)


def _first_list_param(sig: Signature) -> int:
    for i, p in enumerate(sig.params):
        if isinstance(p, ListOf):
            return i
    return -1


def value_to_expr(v: Value, t: SemType) -> Expr:
    match t:
        case _ if t == IntT:
            return ConstI(v)
        case _ if t == FloatT:
            return ConstF(v)
        case _ if t == BoolT:
            return ConstB(v)
        case _ if t == CharT:
            return ConstC(v)
        case ListOf(elem):
            if any(isinstance(s, FnOf) for s in subterms(elem)):
                raise ValueError(f"no literal form for {show_type(t)}")
            if elem == CharT:
                return ConstL(tuple(ConstC(c) for c in v), CharT)
            return ConstL(tuple(value_to_expr(x, elem) for x in v), elem)
        case TupleOf(left, right):
            return MkTuple(value_to_expr(v.left, left), value_to_expr(v.right, right))
    raise ValueError(f"no literal form for {show_type(t)}")


def default_expr(t: SemType) -> Expr:
    """The nil-default literal per type: 0, 0.0, false, ' ', empty list."""
    from .values import default_value
    return value_to_expr(default_value(t), t)


def constant_pool(t: SemType, registry: Registry | None = None) -> tuple[Value, ...]:
    """Ephemeral-constant values of a type: a small base pool plus the
    problem's user-provided constants of that type."""
    reg = registry if registry is not None else BUILTIN_REGISTRY
    base: tuple[Value, ...]
    match t:
        case _ if t == IntT:
            base = (0, 1, 2, 3)
        case _ if t == FloatT:
            base = (0.0, 1.0)
        case _ if t == BoolT:
            base = (False, True)
        case _ if t == CharT:
            base = (" ",)
        case ListOf(elem):
            if any(isinstance(s, FnOf) for s in subterms(elem)):
                base = ()
            elif elem == CharT:
                base = ("",)
            else:
                base = ((),)
        case _:
            base = ()
    extras = tuple(
        p.const_value for p in reg.constants()
        if p.signature.ret == t and p.const_value not in base
    )
    return base + extras


def _extras(sig: Signature, exclude: tuple[int, ...]) -> dict[str, SemType]:
    return {f"arg{i}": p for i, p in enumerate(sig.params) if i not in exclude}


def _all_args(sig: Signature) -> dict[str, SemType]:
    return {f"arg{i}": p for i, p in enumerate(sig.params)}


def _seed_domain(sig: Signature, seed_type: SemType,
                 registry: Registry | None) -> tuple[tuple, ...]:
    domain: list[tuple] = [("arg", i) for i, p in enumerate(sig.params) if p == seed_type]
    try:
        domain += [("const", v) for v in constant_pool(seed_type, registry)]
    except ValueError:
        pass
    return tuple(domain)


def build_template(kind: TemplateKind, sig: Signature,
                   registry: Registry | None = None) -> Template:
    def incompatible(why: str):
        raise TemplateError(
            f"{kind.value} does not fit {show_signature(sig)}: {why}")

    if not sig.params:
        incompatible("no parameters")

    consumed = _first_list_param(sig)
    ret = sig.ret

    match kind:
        case TemplateKind.CATA_REDUCE:
            if consumed < 0:
                incompatible("no list parameter to fold")
            a = sig.params[consumed].elem
            ex = _extras(sig, (consumed,))
            slots = (
                Slot("nil", ret, dict(ex), "base case value"),
                Slot("cons", ret, {**ex, "x": a, "xs": ret},
                     "combine element with suffix result"),
            )
            return Template(kind, slots, sig, consumed_index=consumed, elem_type=a)

        case TemplateKind.CATA_MAP:
            if consumed < 0:
                incompatible("no list parameter to fold")
            if not isinstance(ret, ListOf):
                incompatible("return type is not a list")
            a = sig.params[consumed].elem
            ex = _extras(sig, (consumed,))
            slots = (
                Slot("nil", ret, dict(ex), "regenerated base structure"),
                Slot("cons", ret, {**ex, "x": a, "xs": ret},
                     "rebuild structure around element"),
            )
            return Template(kind, slots, sig, consumed_index=consumed, elem_type=a)

        case TemplateKind.CATA_FN:
            if consumed < 0:
                incompatible("no list parameter to fold")
            fn_list = next(
                (j for j in range(consumed + 1, len(sig.params))
                 if sig.params[j] == sig.params[consumed]), -1)
            if fn_list < 0:
                incompatible("needs a second parameter of the same list type")
            fa = sig.params[consumed]
            a = fa.elem
            ex = _extras(sig, (consumed, fn_list))
            slots = (
                Slot("nil", ret, {**ex, "ys": fa}, "function for the empty prefix"),
                Slot("cons", ret, {**ex, "x": a, "xs": FnOf(fa, ret), "ys": fa},
                     "function combining element, suffix function, and argument"),
            )
            return Template(kind, slots, sig, consumed_index=consumed,
                            fn_list_index=fn_list, elem_type=a)

        case TemplateKind.CATA_TUPLE:
            if consumed < 0:
                incompatible("no list parameter to fold")
            if not isinstance(ret, TupleOf):
                incompatible("return type is not a tuple")
            a = sig.params[consumed].elem
            ex = _extras(sig, (consumed,))
            slots = (
                Slot("nil1", ret.left, dict(ex), "first component base case"),
                Slot("cons1", ret.left, {**ex, "x": a, "xs": ret.left},
                     "first component combine"),
                Slot("nil2", ret.right, dict(ex), "second component base case"),
                Slot("cons2", ret.right, {**ex, "x": a, "xs": ret.right},
                     "second component combine"),
            )
            return Template(kind, slots, sig, consumed_index=consumed, elem_type=a)

        case TemplateKind.ANA_STD:
            if not isinstance(ret, ListOf):
                incompatible("return type is not a list")
            seed_t = sig.params[0]
            scope = {**_all_args(sig), "seed": seed_t}
            slots = (
                Slot("stop", BoolT, dict(scope), "when to stop unfolding",
                     restricted=True),
                Slot("elem", ret.elem, dict(scope), "element emitted this step"),
                Slot("next", seed_t, dict(scope), "seed for the next step"),
            )
            return Template(kind, slots, sig,
                            seed_gene_domain=_seed_domain(sig, seed_t, registry),
                            seed_type=seed_t, elem_type=ret.elem)

        case TemplateKind.HYLO_STD:
            seed_t = sig.params[0]
            scope = {**_all_args(sig), "seed": seed_t}
            ex = _all_args(sig)
            slots = (
                Slot("stop", BoolT, dict(scope), "when to stop unfolding",
                     restricted=True),
                Slot("elem", seed_t, dict(scope), "element emitted this step"),
                Slot("next", seed_t, dict(scope), "seed for the next step"),
                Slot("nil", ret, dict(ex), "base case value"),
                Slot("cons", ret, {**ex, "x": seed_t, "xs": ret},
                     "combine element with suffix result"),
            )
            return Template(kind, slots, sig,
                            seed_gene_domain=_seed_domain(sig, seed_t, registry),
                            seed_type=seed_t, elem_type=seed_t)

        case TemplateKind.ACCU_INDEX:
            if consumed < 0:
                incompatible("no list parameter to fold")
            a = sig.params[consumed].elem
            ex = _extras(sig, (consumed,))
            slots = (
                Slot("init", IntT, dict(ex), "initial accumulator"),
                Slot("step", IntT, {**ex, "x": a, "s": IntT}, "advance accumulator"),
                Slot("nil", ret, {**ex, "s": IntT}, "base case given final state"),
                Slot("cons", ret, {**ex, "x": a, "xs": ret, "s": IntT},
                     "combine element, suffix result, and state"),
            )
            return Template(kind, slots, sig, consumed_index=consumed, elem_type=a)

        case TemplateKind.ACCU_COMBINE:
            if consumed < 0:
                incompatible("no list parameter to fold")
            a = sig.params[consumed].elem
            state = TupleOf(ret, ret)
            ex = _extras(sig, (consumed,))
            slots = (
                Slot("init", state, dict(ex), "initial paired accumulator"),
                Slot("step", state, {**ex, "x": a, "s1": ret, "s2": ret},
                     "advance both accumulators"),
                Slot("nil", ret, {**ex, "s1": ret, "s2": ret},
                     "combine final accumulators"),
            )
            return Template(kind, slots, sig, consumed_index=consumed, elem_type=a)

    raise AssertionError(kind)


def fixed_nil_slots(template: Template, nil_default_policy: bool) -> frozenset[str]:
    """Slot names pinned to type defaults (and excluded from variation) when
    the nil-default policy is on: the base cases of the cata family."""
    if not nil_default_policy or template.kind not in CATA_FAMILY:
        return frozenset()
    return frozenset(s.name for s in template.slots if s.name.startswith("nil"))


class Program:
    """A filled template: pure callable from input Values to an output Value.

    Evaluation errors surface as EvalSignal subclasses (FuelExhausted,
    RuntimePartial, Diverged); fitness folds them into scores.
    """

    def __init__(self, template: Template, genome, fuel: int, max_steps: int,
                 registry: Registry | None):
        self.template = template
        self.genome = genome
        self.fuel = fuel
        self.max_steps = max_steps
        reg = registry if registry is not None else BUILTIN_REGISTRY
        self._c = {name: compile_expr(e, reg)
                   for name, e in genome.slot_exprs.items()}
        self._xs_c = compile_expr(Var("xs"), reg)

    def _seed(self, args: tuple) -> Value:
        tag, v = self.genome.seed_gene
        return args[v] if tag == "arg" else v

    def __call__(self, args: tuple) -> Value:
        t = self.template
        if len(args) != len(t.signature.params):
            raise AssembleError(
                f"expected {len(t.signature.params)} arguments, got {len(args)}")
        env = {f"arg{i}": v for i, v in enumerate(args)}
        cell = [self.fuel]
        c = self._c
        match t.kind:
            case TemplateKind.CATA_REDUCE | TemplateKind.CATA_MAP:
                return cata_c(c["nil"], c["cons"], env,
                              args[t.consumed_index], cell)
            case TemplateKind.CATA_FN:
                fn = cata_fn_c(c["nil"], c["cons"], env,
                               args[t.consumed_index], cell)
                return fn(args[t.fn_list_index])
            case TemplateKind.CATA_TUPLE:
                items = args[t.consumed_index]
                left = cata_c(c["nil1"], c["cons1"], env, items, cell)
                right = cata_c(c["nil2"], c["cons2"], env, items, cell)
                return Pair(left, right)
            case TemplateKind.ANA_STD:
                out, diverged = ana_c(c["stop"], c["elem"], c["next"],
                                      self._seed(args), env, self.max_steps, cell)
                if diverged:
                    raise Diverged(f"unfold exceeded {self.max_steps} steps")
                return "".join(out) if t.elem_type == CharT else tuple(out)
            case TemplateKind.HYLO_STD:
                return hylo_c(c["stop"], c["elem"], c["next"], c["nil"], c["cons"],
                              self._seed(args), env, self.max_steps, cell)
            case TemplateKind.ACCU_INDEX:
                return accu_c(c["init"], c["step"], c["nil"], c["cons"], env,
                              args[t.consumed_index], cell, ("s",))
            case TemplateKind.ACCU_COMBINE:
                return accu_c(c["init"], c["step"], c["nil"], self._xs_c, env,
                              args[t.consumed_index], cell, ("s1", "s2"))
        raise AssertionError(t.kind)


def assemble(template: Template, genome, fuel: int = DEFAULT_FUEL,
             max_steps: int = DEFAULT_MAX_STEPS,
             registry: Registry | None = None, validate: bool = True) -> Program:
    """Validate a genome against its template and build the runnable Program.

    Slot or type mismatches raise AssembleError before any evaluation.
    The search loop passes validate=False for genomes its own typed
    operators produced; everything arriving from outside stays checked.
    """
    want = set(template.slot_names())
    got = set(genome.slot_exprs)
    if want != got:
        raise AssembleError(f"slots {sorted(got)} do not match template "
                            f"slots {sorted(want)}")
    if validate:
        for slot in template.slots:
            try:
                typecheck(genome.slot_exprs[slot.name], slot.vars,
                          registry, expected=slot.return_type)
            except ExprTypeError as err:
                raise AssembleError(f"slot {slot.name}: {err}") from err
    if template.seed_gene_domain is not None:
        gene = genome.seed_gene
        if gene is None:
            raise AssembleError("template requires a seed gene")
        tag, v = gene
        if tag == "arg":
            if not (0 <= v < len(template.signature.params)
                    and template.signature.params[v] == template.seed_type):
                raise AssembleError(f"seed argument {v} is not seed-typed")
        elif tag == "const":
            if not value_conforms(v, template.seed_type):
                raise AssembleError(f"seed constant {v!r} is not seed-typed")
        else:
            raise AssembleError(f"unknown seed gene tag {tag!r}")
    elif genome.seed_gene is not None:
        raise AssembleError("template takes no seed gene")
    return Program(template, genome, fuel, max_steps, registry)
