"""Expression trees for template slots: typechecker, renderer, parser, and a
fuel-limited evaluator.

Evaluation is pure and total: fuel counts evaluated nodes and FuelExhausted /
RuntimePartial are in-band signals, never crashes. Expressions compile once
into nested closures taking (env: dict, fuel: one-cell list); the public
eval() wraps that for single calls, the scheme drivers reuse compiled bodies
across steps with a shared fuel cell.

Canonical rendering is prefix and parenthesized:

    expr   := atom | '[' expr* ']' | '(' head expr* ')'
    head   := 'if' | 'pair' | primitive id | variable (curried application)
    atom   := integer | float (with '.') | 'c' | "chars" | true | false | name

Char lists render as string literals when fully constant. A bare '[]' is only
parseable where the element type is determined by context.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from keyword import iskeyword

from .primitives import BUILTIN_REGISTRY, Registry, wrap64
from .types import (
    Atom, BoolT, CharT, FloatT, FnOf, IntT, ListOf, SemType, TupleOf,
    apply_subst, is_ground, satisfies, show_type, unify,
)
from .values import FuelExhausted, Pair, Value


@dataclass(frozen=True, slots=True)
class Expr:
    pass


@dataclass(frozen=True, slots=True)
class Var(Expr):
    name: str


@dataclass(frozen=True, slots=True)
class ConstI(Expr):
    value: int


@dataclass(frozen=True, slots=True)
class ConstF(Expr):
    value: float


@dataclass(frozen=True, slots=True)
class ConstB(Expr):
    value: bool


@dataclass(frozen=True, slots=True)
class ConstC(Expr):
    value: str


@dataclass(frozen=True, slots=True)
class ConstL(Expr):
    items: tuple[Expr, ...]
    elem_type: SemType


@dataclass(frozen=True, slots=True)
class PrimApp(Expr):
    prim_id: str
    args: tuple[Expr, ...]


@dataclass(frozen=True, slots=True)
class If(Expr):
    cond: Expr
    then: Expr
    orelse: Expr


@dataclass(frozen=True, slots=True)
class Apply(Expr):
    fn: Expr
    arg: Expr


@dataclass(frozen=True, slots=True)
class MkTuple(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Env:
    """Immutable-by-contract variable bindings; the two maps share keys."""
    values: dict[str, Value] = field(default_factory=dict)
    types: dict[str, SemType] = field(default_factory=dict)

    @classmethod
    def empty(cls) -> "Env":
        return cls({}, {})


class ExprTypeError(Exception):
    def __init__(self, path: tuple[str, ...], msg: str):
        where = ".".join(path) if path else "root"
        super().__init__(f"{where}: {msg}")
        self.path = path


class ExprSyntaxError(Exception):
    pass


def children(e: Expr) -> tuple[Expr, ...]:
    match e:
        case ConstL(items, _):
            return items
        case PrimApp(_, args):
            return args
        case If(c, t, o):
            return (c, t, o)
        case Apply(f, a):
            return (f, a)
        case MkTuple(l, r):
            return (l, r)
    return ()


def _with_children(e: Expr, kids: tuple[Expr, ...]) -> Expr:
    match e:
        case ConstL(_, et):
            return ConstL(kids, et)
        case PrimApp(pid, _):
            return PrimApp(pid, kids)
        case If(_, _, _):
            return If(*kids)
        case Apply(_, _):
            return Apply(*kids)
        case MkTuple(_, _):
            return MkTuple(*kids)
    raise AssertionError(f"{e} has no children")


def depth(e: Expr) -> int:
    kids = children(e)
    if not kids:
        return 0
    return 1 + max(depth(k) for k in kids)


def size(e: Expr) -> int:
    return 1 + sum(size(k) for k in kids) if (kids := children(e)) else 1


def get_subtree(e: Expr, path: tuple[int, ...]) -> Expr:
    for i in path:
        e = children(e)[i]
    return e


def replace_subtree(e: Expr, path: tuple[int, ...], new: Expr) -> Expr:
    if not path:
        return new
    kids = list(children(e))
    kids[path[0]] = replace_subtree(kids[path[0]], path[1:], new)
    return _with_children(e, tuple(kids))


def _child_label(e: Expr, i: int) -> str:
    match e:
        case PrimApp(pid, _):
            return f"{pid}#arg{i}"
        case If(_, _, _):
            return ("cond", "then", "else")[i]
        case Apply(_, _):
            return ("fn", "arg")[i]
        case MkTuple(_, _):
            return ("left", "right")[i]
        case ConstL(_, _):
            return f"item{i}"
    return str(i)


def typecheck(
    e: Expr,
    var_types: dict[str, SemType],
    registry: Registry | None = None,
    expected: SemType | None = None,
) -> SemType:
    """The unique ground type of e, or ExprTypeError naming the node path."""
    reg = registry if registry is not None else BUILTIN_REGISTRY

    def fail(path, msg):
        raise ExprTypeError(tuple(path), msg)

    def check(e: Expr, path: list[str], want: SemType | None) -> SemType:
        match e:
            case Var(name):
                t = var_types.get(name)
                if t is None:
                    fail(path, f"unknown variable {name!r}")
            case ConstI(_):
                t = IntT
            case ConstF(_):
                t = FloatT
            case ConstB(_):
                t = BoolT
            case ConstC(v):
                if len(v) != 1:
                    fail(path, f"char constant of length {len(v)}")
                t = CharT
            case ConstL(items, et):
                if not is_ground(et):
                    fail(path, "list literal with non-ground element type")
                for i, item in enumerate(items):
                    check(item, path + [_child_label(e, i)], et)
                t = ListOf(et)
            case PrimApp(pid, args):
                if pid not in reg:
                    fail(path, f"unknown primitive {pid!r}")
                p = reg.get(pid)
                if p.structural:
                    fail(path, f"{pid} is a structural form, use the If node")
                if len(args) != len(p.signature.params):
                    fail(path, f"{pid} expects {len(p.signature.params)} args, got {len(args)}")
                subst: dict[str, SemType] = {}
                if want is not None:
                    s = unify(p.signature.ret, want, subst)
                    if s is None:
                        fail(path, f"{pid} returns {show_type(p.signature.ret)}, "
                                   f"context expects {show_type(want)}")
                    subst = s
                for i, (param, arg) in enumerate(zip(p.signature.params, args)):
                    param_t = apply_subst(param, subst)
                    arg_t = check(arg, path + [_child_label(e, i)],
                                  param_t if is_ground(param_t) else None)
                    s = unify(param_t, arg_t, subst)
                    if s is None:
                        fail(path + [_child_label(e, i)],
                             f"expected {show_type(param_t)}, got {show_type(arg_t)}")
                    subst = s
                t = apply_subst(p.signature.ret, subst)
                if not is_ground(t):
                    fail(path, f"ambiguous polymorphic application of {pid}")
                for var, c in p.constraints:
                    assigned = subst.get(var)
                    if assigned is not None and not satisfies(assigned, c):
                        fail(path, f"{pid} requires {c} type, got {show_type(assigned)}")
            case If(c, th, el):
                check(c, path + ["cond"], BoolT)
                t_then = check(th, path + ["then"], want)
                t_else = check(el, path + ["else"], want)
                if t_then != t_else:
                    fail(path, f"branch types differ: {show_type(t_then)} vs {show_type(t_else)}")
                t = t_then
            case Apply(f, a):
                ft = check(f, path + ["fn"], None)
                if not isinstance(ft, FnOf):
                    fail(path + ["fn"], f"applied non-function of type {show_type(ft)}")
                check(a, path + ["arg"], ft.arg)
                t = ft.ret
            case MkTuple(l, r):
                wl = want.left if isinstance(want, TupleOf) else None
                wr = want.right if isinstance(want, TupleOf) else None
                t = TupleOf(check(l, path + ["left"], wl), check(r, path + ["right"], wr))
            case _:
                fail(path, f"unknown node {e!r}")
        if want is not None and t != want:
            fail(path, f"expected {show_type(want)}, got {show_type(t)}")
        return t

    return check(e, [], expected)


def typed_nodes(
    e: Expr,
    var_types: dict[str, SemType],
    registry: Registry | None = None,
) -> list[tuple[tuple[int, ...], Expr, SemType]]:
    """Every node with its index path and ground type, preorder."""
    reg = registry if registry is not None else BUILTIN_REGISTRY
    out: list[tuple[tuple[int, ...], Expr, SemType]] = []

    def walk(e: Expr, path: tuple[int, ...]) -> SemType:
        match e:
            case Var(name):
                t = var_types[name]
            case ConstI(_):
                t = IntT
            case ConstF(_):
                t = FloatT
            case ConstB(_):
                t = BoolT
            case ConstC(_):
                t = CharT
            case ConstL(items, et):
                for i, item in enumerate(items):
                    walk(item, path + (i,))
                t = ListOf(et)
            case PrimApp(pid, args):
                p = reg.get(pid)
                subst: dict[str, SemType] = {}
                arg_ts = [walk(a, path + (i,)) for i, a in enumerate(args)]
                for param, arg_t in zip(p.signature.params, arg_ts):
                    subst = unify(apply_subst(param, subst), arg_t, subst)
                t = apply_subst(p.signature.ret, subst)
            case If(c, th, el):
                walk(c, path + (0,))
                t = walk(th, path + (1,))
                walk(el, path + (2,))
            case Apply(f, a):
                ft = walk(f, path + (0,))
                walk(a, path + (1,))
                t = ft.ret
            case MkTuple(l, r):
                t = TupleOf(walk(l, path + (0,)), walk(r, path + (1,)))
            case _:
                raise AssertionError(e)
        out.append((path, e, t))
        return t

    walk(e, ())
    return out


# ---------------------------------------------------------------------------
# compilation and evaluation


def _static_const(e: Expr):
    """(value, node_cost) when e is a constant with no variables, else None."""
    match e:
        case ConstI(v) | ConstF(v) | ConstB(v) | ConstC(v):
            return v, 1
        case ConstL(items, et):
            parts = []
            cost = 1
            for item in items:
                s = _static_const(item)
                if s is None:
                    return None
                parts.append(s[0])
                cost += s[1]
            if et == CharT:
                return "".join(parts), cost
            return tuple(parts), cost
    return None



# primitive ids emitted as native operators; everything else goes through
# its impl so partiality checks stay in one place
_CMP_CODE = {"==": "==", "/=": "!=", "<": "<", "<=": "<=", ">": ">", ">=": ">="}

_WRAP_LO = "-4611686018427387904"
_WRAP_HI = "4611686018427387904"


def _wrap_spill(v):
    return wrap64(v) if type(v) is int else v


# sequence builders charge the cells they are about to allocate, before
# allocating them: otherwise a doubling accumulator like (<> xs xs) pays a
# few units per call while its result grows exponentially
def _charged_cat(fuel, a, b):
    fuel[0] -= len(a) + len(b)
    if fuel[0] < 0:
        raise FuelExhausted
    return a + b


def _charged_cons(fuel, x, xs):
    fuel[0] -= len(xs) + 1
    if fuel[0] < 0:
        raise FuelExhausted
    return x + xs if type(xs) is str else (x,) + xs


def _charged_snoc(fuel, xs, x):
    fuel[0] -= len(xs) + 1
    if fuel[0] < 0:
        raise FuelExhausted
    return xs + x if type(xs) is str else xs + (x,)


def _charged_insert(fuel, impl, f, k, v, m):
    fuel[0] -= len(m) + 1
    if fuel[0] < 0:
        raise FuelExhausted
    return impl(f, k, v, m)


class _Emitter:
    """Turns one expression into the body of a generated Python function.

    Bindings collected along the way (primitive impls, non-scalar constants)
    become globals of the generated function; evolved variable names become
    hoisted locals. Every emitted fragment is parenthesized."""

    def __init__(self, reg: Registry):
        self.reg = reg
        self.binds: dict[str, object] = {}
        self.hoist: set[str] = set()
        self._impl_names: dict[str, str] = {}
        self._n = 0

    def _temp(self) -> str:
        self._n += 1
        return f"_t{self._n}"

    def _bind(self, prefix: str, value) -> str:
        name = f"_{prefix}{len(self.binds)}"
        self.binds[name] = value
        return name

    def _impl(self, pid: str) -> str:
        name = self._impl_names.get(pid)
        if name is None:
            name = self._bind("f", self.reg.get(pid).impl)
            self._impl_names[pid] = name
        return name

    def _lit(self, v) -> str:
        if type(v) is bool or type(v) is int or type(v) is str:
            return repr(v)
        if type(v) is float:
            if v == v and abs(v) != float("inf"):
                return repr(v)
            return self._bind("K", v)
        return self._bind("K", v)

    def _wrapped(self, code: str) -> str:
        t = self._temp()
        return (f"({t} if {_WRAP_LO} < ({t} := {code}) < {_WRAP_HI}"
                f" else _ww({t}))")

    def emit(self, e: Expr) -> str:
        folded = _static_const(e)
        if folded is not None:
            return self._lit(folded[0])
        match e:
            case Var(name):
                if (name.isidentifier() and not name.startswith("_")
                        and name not in ("env", "fuel") and not iskeyword(name)):
                    self.hoist.add(name)
                    return name
                return f"env[{name!r}]"
            case ConstL(items, et):
                parts = [self.emit(it) for it in items]
                if et == CharT:
                    return "(" + " + ".join(parts) + ")"
                return "(" + ", ".join(parts) + ",)"
            case PrimApp(pid, args):
                return self._prim(pid, args)
            case If(c, t, o):
                return f"({self.emit(t)} if {self.emit(c)} else {self.emit(o)})"
            case Apply(f, a):
                return f"{self.emit(f)}({self.emit(a)})"
            case MkTuple(l, r):
                self.binds.setdefault("_Pair", Pair)
                return f"_Pair({self.emit(l)}, {self.emit(r)})"
        raise AssertionError(f"cannot compile {e!r}")

    def _prim(self, pid: str, args: tuple[Expr, ...]) -> str:
        p = self.reg.get(pid)
        if p.structural:
            raise ValueError(f"cannot compile structural form {pid}")
        if p.const_value is not None or not p.signature.params:
            return self._lit(p.const_value)
        match pid:
            case "&&":
                return f"({self.emit(args[0])} and {self.emit(args[1])})"
            case "||":
                return f"({self.emit(args[0])} or {self.emit(args[1])})"
            case "not":
                return f"(not {self.emit(args[0])})"
            case "+" | "-" | "*":
                self.binds.setdefault("_ww", _wrap_spill)
                code = f"({self.emit(args[0])} {pid} {self.emit(args[1])})"
                return self._wrapped(code)
            case "abs":
                self.binds.setdefault("_ww", _wrap_spill)
                return self._wrapped(f"abs({self.emit(args[0])})")
            case "min" | "max":
                return f"{pid}({self.emit(args[0])}, {self.emit(args[1])})"
            case "==" | "/=" | "<" | "<=" | ">" | ">=":
                op = _CMP_CODE[pid]
                return f"({self.emit(args[0])} {op} {self.emit(args[1])})"
            case "<>":
                self.binds.setdefault("_cat", _charged_cat)
                return f"_cat(fuel, {self.emit(args[0])}, {self.emit(args[1])})"
            case "cons":
                self.binds.setdefault("_cns", _charged_cons)
                return f"_cns(fuel, {self.emit(args[0])}, {self.emit(args[1])})"
            case "snoc":
                self.binds.setdefault("_snc", _charged_snoc)
                return f"_snc(fuel, {self.emit(args[0])}, {self.emit(args[1])})"
            case "insertWith":
                self.binds.setdefault("_ins", _charged_insert)
                self.binds.setdefault("_insf", self.reg.get(pid).impl)
                inner = ", ".join(self.emit(a) for a in args)
                return f"_ins(fuel, _insf, {inner})"
            case "length":
                return f"len({self.emit(args[0])})"
            case "null":
                return f"(not {self.emit(args[0])})"
            case "elem":
                return f"({self.emit(args[0])} in {self.emit(args[1])})"
            case "fst":
                return f"{self.emit(args[0])}.left"
            case "snd":
                return f"{self.emit(args[0])}.right"
            case "id":
                return self.emit(args[0])
            case "fromIntegral":
                return f"float({self.emit(args[0])})"
            case "fromEnum":
                t = self._temp()
                return (f"(ord({t}) if type(({t} := {self.emit(args[0])}))"
                        f" is str else {t} + 0)")
        name = self._impl(pid)
        return f"{name}({', '.join(self.emit(a) for a in args)})"


@lru_cache(maxsize=4096)
def _compile_source(src: str):
    return compile(src, "<origami-slot>", "exec")


def compile_expr(e: Expr, registry: Registry | None = None):
    """Compile to a function (env: dict, fuel: [int]) -> Value.

    Each call charges the expression's full node count against the fuel
    cell before evaluating, so a driver's baseline draw is exactly
    sum(size(slot)) over the slot calls it makes. If, && and || still
    evaluate lazily; laziness just no longer discounts fuel. On top of
    the flat charge, sequence builders (<>, cons, snoc, insertWith) pay
    one unit per cell of the value they construct, which bounds the
    memory any single call can touch by the fuel budget.
    """
    reg = registry if registry is not None else BUILTIN_REGISTRY
    cache = reg.__dict__.setdefault("_compiled", {})
    fn = cache.get(e)
    if fn is not None:
        return fn
    em = _Emitter(reg)
    body = em.emit(e)
    lines = [
        "def _slot(env, fuel):",
        f"    fuel[0] -= {size(e)}",
        "    if fuel[0] < 0:",
        "        raise _FX",
    ]
    lines.extend(f"    {v} = env[{v!r}]" for v in sorted(em.hoist))
    lines.append(f"    return {body}")
    g = {"_FX": FuelExhausted, **em.binds}
    exec(_compile_source("\n".join(lines)), g)
    if len(cache) > 50_000:
        cache.clear()
    cache[e] = g["_slot"]
    return g["_slot"]


DEFAULT_FUEL = 100_000


def eval_expr(
    e: Expr,
    env: Env | dict[str, Value],
    fuel: int = DEFAULT_FUEL,
    registry: Registry | None = None,
) -> Value:
    """Evaluate a typechecked expression; pure, deterministic, fuel-bounded."""
    vals = env.values if isinstance(env, Env) else env
    cell = [fuel]
    return compile_expr(e, registry)(vals, cell)


# ---------------------------------------------------------------------------
# canonical text form

_CHAR_ESCAPES = {"\n": "\\n", "\t": "\\t", "\\": "\\\\", "'": "\\'"}
_STR_ESCAPES = {"\n": "\\n", "\t": "\\t", "\\": "\\\\", '"': '\\"'}
_UNESCAPES = {"n": "\n", "t": "\t", "\\": "\\", "'": "'", '"': '"'}


def render(e: Expr) -> str:
    match e:
        case Var(name):
            return name
        case ConstI(v):
            return str(v)
        case ConstF(v):
            return repr(v)
        case ConstB(v):
            return "true" if v else "false"
        case ConstC(v):
            return f"'{_CHAR_ESCAPES.get(v, v)}'"
        case ConstL(items, et):
            if et == CharT and all(type(i) is ConstC for i in items):
                body = "".join(_STR_ESCAPES.get(i.value, i.value) for i in items)
                return f'"{body}"'
            if not items:
                return f"(empty {_elem_type_text(et)})"
            return "[" + " ".join(render(i) for i in items) + "]"
        case PrimApp(pid, args):
            if not args:
                return f"({pid})"
            return "(" + " ".join([pid, *(render(a) for a in args)]) + ")"
        case If(c, t, o):
            return f"(if {render(c)} {render(t)} {render(o)})"
        case Apply(_, _):
            parts = []
            while isinstance(e, Apply):
                parts.append(e.arg)
                e = e.fn
            head = render(e)
            return "(" + " ".join([head, *(render(a) for a in reversed(parts))]) + ")"
        case MkTuple(l, r):
            return f"(pair {render(l)} {render(r)})"
    raise AssertionError(e)


def _elem_type_text(t: SemType) -> str:
    match t:
        case ListOf(elem):
            return f"[{_elem_type_text(elem)}]"
        case TupleOf(left, right):
            return f"(pair {_elem_type_text(left)} {_elem_type_text(right)})"
        case Atom(name):
            return name
    raise AssertionError(t)


def _scan(text: str) -> list[str]:
    toks = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in "()[]":
            toks.append(c)
            i += 1
            continue
        if c == "'":
            j = i + 1
            if j < n and text[j] == "\\":
                j += 2
            elif j < n:
                j += 1
            if j >= n or text[j] != "'":
                raise ExprSyntaxError(f"unterminated char literal at {i}")
            toks.append(text[i:j + 1])
            i = j + 1
            continue
        if c == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 2 if text[j] == "\\" else 1
            if j >= n:
                raise ExprSyntaxError(f"unterminated string literal at {i}")
            toks.append(text[i:j + 1])
            i = j + 1
            continue
        j = i
        while j < n and not text[j].isspace() and text[j] not in "()[]'\"":
            j += 1
        toks.append(text[i:j])
        i = j
    return toks


_INT_CHARS = set("0123456789")


def _is_int_token(tok: str) -> bool:
    body = tok[1:] if tok[0] == "-" else tok
    return bool(body) and set(body) <= _INT_CHARS


def _is_float_token(tok: str) -> bool:
    if tok[0] not in "-0123456789" or (tok[0] == "-" and len(tok) == 1):
        return False
    if "." not in tok and "e" not in tok and "E" not in tok:
        return False
    try:
        float(tok)
        return True
    except ValueError:
        return False


class _ExprParser:
    def __init__(self, toks: list[str], var_types: dict[str, SemType], reg: Registry):
        self.toks = toks
        self.pos = 0
        self.vars = var_types
        self.reg = reg

    def peek(self) -> str | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ExprSyntaxError("unexpected end of expression")
        self.pos += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.next()
        if got != tok:
            raise ExprSyntaxError(f"expected {tok!r}, got {got!r}")

    def infer(self, e: Expr) -> SemType | None:
        try:
            return typecheck(e, self.vars, self.reg)
        except ExprTypeError:
            return None

    def expr(self, want: SemType | None) -> Expr:
        tok = self.next()
        if tok == "(":
            return self.form(want)
        if tok == "[":
            return self.list_lit(want)
        if tok[0] == '"':
            body = _unescape(tok[1:-1])
            return ConstL(tuple(ConstC(c) for c in body), CharT)
        if tok[0] == "'":
            return ConstC(_unescape(tok[1:-1]))
        if tok == "true":
            return ConstB(True)
        if tok == "false":
            return ConstB(False)
        if _is_int_token(tok):
            return ConstI(int(tok))
        if _is_float_token(tok):
            return ConstF(float(tok))
        if tok in self.vars:
            return Var(tok)
        if tok in self.reg:
            p = self.reg.get(tok)
            if not p.signature.params:
                return PrimApp(tok, ())
            raise ExprSyntaxError(f"primitive {tok!r} needs arguments")
        raise ExprSyntaxError(f"unknown identifier {tok!r}")

    def form(self, want: SemType | None) -> Expr:
        head = self.next()
        if head == "if":
            c = self.expr(BoolT)
            t = self.expr(want)
            o = self.expr(want)
            self.expect(")")
            return If(c, t, o)
        if head == "pair":
            wl = want.left if isinstance(want, TupleOf) else None
            wr = want.right if isinstance(want, TupleOf) else None
            l = self.expr(wl)
            r = self.expr(wr)
            self.expect(")")
            return MkTuple(l, r)
        if head == "empty":
            et = self.type_form()
            self.expect(")")
            return ConstL((), et)
        if head in self.vars:
            node: Expr = Var(head)
            t: SemType = self.vars[head]
            while self.peek() != ")":
                if not isinstance(t, FnOf):
                    raise ExprSyntaxError(f"too many arguments for {head!r}")
                node = Apply(node, self.expr(t.arg))
                t = t.ret
            self.expect(")")
            return node
        if head in self.reg:
            p = self.reg.get(head)
            subst: dict[str, SemType] = {}
            if want is not None:
                s = unify(p.signature.ret, want, {})
                if s is not None:
                    subst = s
            args = []
            for param in p.signature.params:
                param_t = apply_subst(param, subst)
                arg = self.expr(param_t if is_ground(param_t) else None)
                arg_t = self.infer(arg)
                if arg_t is not None:
                    s = unify(param_t, arg_t, subst)
                    if s is not None:
                        subst = s
                args.append(arg)
            self.expect(")")
            return PrimApp(head, tuple(args))
        raise ExprSyntaxError(f"unknown head {head!r}")

    def type_form(self) -> SemType:
        # element types for (empty T): atoms, [T], and (pair T T)
        tok = self.next()
        if tok == "[":
            t = self.type_form()
            self.expect("]")
            return ListOf(t)
        if tok == "(":
            self.expect("pair")
            l = self.type_form()
            r = self.type_form()
            self.expect(")")
            return TupleOf(l, r)
        base = {"Int": IntT, "Float": FloatT, "Bool": BoolT, "Char": CharT}.get(tok)
        if base is None:
            raise ExprSyntaxError(f"unknown element type {tok!r}")
        return base

    def list_lit(self, want: SemType | None) -> Expr:
        elem = want.elem if isinstance(want, ListOf) else None
        items: list[Expr] = []
        while True:
            tok = self.peek()
            if tok is None:
                raise ExprSyntaxError("unterminated list literal")
            if tok == "]":
                self.next()
                break
            item = self.expr(elem)
            if elem is None:
                elem = self.infer(item)
            items.append(item)
        if elem is None or not is_ground(elem):
            raise ExprSyntaxError("cannot determine element type of list literal")
        return ConstL(tuple(items), elem)


def _unescape(body: str) -> str:
    out = []
    i = 0
    while i < len(body):
        c = body[i]
        if c == "\\":
            i += 1
            if i >= len(body) or body[i] not in _UNESCAPES:
                raise ExprSyntaxError(f"bad escape in literal: {body!r}")
            out.append(_UNESCAPES[body[i]])
        else:
            out.append(c)
        i += 1
    return "".join(out)


def parse_expr(
    text: str,
    expected: SemType,
    var_types: dict[str, SemType],
    registry: Registry | None = None,
) -> Expr:
    """Parse canonical text into an Expr and typecheck it against expected."""
    reg = registry if registry is not None else BUILTIN_REGISTRY
    parser = _ExprParser(_scan(text), var_types, reg)
    e = parser.expr(expected)
    if parser.peek() is not None:
        raise ExprSyntaxError(f"trailing tokens after expression: {parser.peek()!r}")
    typecheck(e, var_types, reg, expected)
    return e
