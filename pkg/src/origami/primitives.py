"""Builtin and user-provided primitives: typed signatures plus value semantics.

Integer arithmetic wraps at 64-bit two's complement. Partial operations
(head/tail/init/last on empty, div/quot/mod/rem by zero, ^ with a negative
exponent, toEnum out of range, findMap on a missing key) raise RuntimePartial,
which fitness scores as a failed case.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable

from .types import (
    BoolT, CharT, FloatT, FnOf, IntT, ListOf, SemType, Signature, TupleOf,
    TypeVar, apply_subst, instantiate, satisfies, type_vars,
)
from .values import Pair, RuntimePartial, Value

_A = TypeVar("a")
_B = TypeVar("b")
_C = TypeVar("c")
_K = TypeVar("k")
_V = TypeVar("v")

_U64 = 1 << 64
_I63 = 1 << 63
_FAST = 1 << 62


def wrap64(n: int) -> int:
    if -_FAST < n < _FAST:
        return n
    n &= _U64 - 1
    return n - _U64 if n >= _I63 else n


def _to_signed(u: int) -> int:
    return u - _U64 if u >= _I63 else u


@dataclass(frozen=True)
class Primitive:
    id: str
    name: str
    signature: Signature
    impl: Callable | None
    origin: str = "builtin"
    constraints: tuple[tuple[str, str], ...] = ()
    structural: bool = False
    const_value: Value | None = None

    def constraint_of(self, var: str) -> str | None:
        for v, c in self.constraints:
            if v == var:
                return c
        return None


class UnknownPrimitive(KeyError):
    pass


class UnknownProblem(KeyError):
    pass


# numeric
def _add(a, b):
    r = a + b
    return wrap64(r) if type(r) is int else r


def _sub(a, b):
    r = a - b
    return wrap64(r) if type(r) is int else r


def _mul(a, b):
    r = a * b
    return wrap64(r) if type(r) is int else r


def _fdiv(a, b):
    if b == 0.0:
        raise RuntimePartial("division by zero")
    return a / b


def _pow(a, e):
    if e < 0:
        raise RuntimePartial("negative exponent")
    return _to_signed(pow(a, e, _U64))


def _div(a, b):
    if b == 0:
        raise RuntimePartial("division by zero")
    return wrap64(a // b)


def _quot(a, b):
    if b == 0:
        raise RuntimePartial("division by zero")
    q = a // b
    if q < 0 and q * b != a:
        q += 1
    return wrap64(q)


def _mod(a, b):
    if b == 0:
        raise RuntimePartial("division by zero")
    return a % b


def _rem(a, b):
    if b == 0:
        raise RuntimePartial("division by zero")
    return a - b * _quot(a, b)


def _abs(a):
    r = abs(a)
    return wrap64(r) if type(r) is int else r


# lists (char lists are str, others tuple; both close under these)
def _cons(x, xs):
    return x + xs if type(xs) is str else (x,) + xs


def _snoc(xs, x):
    return xs + x if type(xs) is str else xs + (x,)


def _head(xs):
    if not xs:
        raise RuntimePartial("head of empty list")
    return xs[0]


def _tail(xs):
    if not xs:
        raise RuntimePartial("tail of empty list")
    return xs[1:]


def _init(xs):
    if not xs:
        raise RuntimePartial("init of empty list")
    return xs[:-1]


def _last(xs):
    if not xs:
        raise RuntimePartial("last of empty list")
    return xs[-1]


def _delete(x, xs):
    if type(xs) is str:
        i = xs.find(x)
        return xs if i < 0 else xs[:i] + xs[i + 1:]
    for i, y in enumerate(xs):
        if y == x:
            return xs[:i] + xs[i + 1:]
    return xs


def _find_map(k, m):
    for p in m:
        if p.left == k:
            return p.right
    raise RuntimePartial("key not found")


def _insert_with(f, k, v, m):
    for i, p in enumerate(m):
        if p.left == k:
            return m[:i] + (Pair(k, f(v)(p.right)),) + m[i + 1:]
    return (Pair(k, v),) + m


def _from_enum(v):
    return ord(v) if type(v) is str else int(v)


def _to_enum(n):
    if 0 <= n <= 0x10FFFF:
        return chr(n)
    raise RuntimePartial("toEnum out of range")


def _sig(params: list[SemType], ret: SemType) -> Signature:
    return Signature(tuple(params), ret)


def _p(pid, sig, impl, name=None, constraints=(), structural=False):
    return Primitive(pid, name or pid, sig, impl,
                     constraints=constraints, structural=structural)


_LA = ListOf(_A)
_BUILTINS = (
    # numbers
    _p("fromIntegral", _sig([IntT], FloatT), float),
    _p("+", _sig([_A, _A], _A), _add, constraints=(("a", "num"),)),
    _p("-", _sig([_A, _A], _A), _sub, constraints=(("a", "num"),)),
    _p("*", _sig([_A, _A], _A), _mul, constraints=(("a", "num"),)),
    _p("/", _sig([FloatT, FloatT], FloatT), _fdiv),
    _p("^", _sig([IntT, IntT], IntT), _pow),
    _p("div", _sig([IntT, IntT], IntT), _div),
    _p("quot", _sig([IntT, IntT], IntT), _quot),
    _p("mod", _sig([IntT, IntT], IntT), _mod),
    _p("rem", _sig([IntT, IntT], IntT), _rem),
    _p("abs", _sig([_A], _A), _abs, constraints=(("a", "num"),)),
    _p("min", _sig([_A, _A], _A), min, constraints=(("a", "ord"),)),
    _p("max", _sig([_A, _A], _A), max, constraints=(("a", "ord"),)),
    # logical
    _p("<", _sig([_A, _A], BoolT), lambda a, b: a < b, constraints=(("a", "ord"),)),
    _p("<=", _sig([_A, _A], BoolT), lambda a, b: a <= b, constraints=(("a", "ord"),)),
    _p(">", _sig([_A, _A], BoolT), lambda a, b: a > b, constraints=(("a", "ord"),)),
    _p(">=", _sig([_A, _A], BoolT), lambda a, b: a >= b, constraints=(("a", "ord"),)),
    _p("==", _sig([_A, _A], BoolT), lambda a, b: a == b, constraints=(("a", "eq"),)),
    _p("/=", _sig([_A, _A], BoolT), lambda a, b: a != b, constraints=(("a", "eq"),)),
    # && and || have strict impls here; the compiler short-circuits them
    _p("&&", _sig([BoolT, BoolT], BoolT), lambda a, b: a and b),
    _p("||", _sig([BoolT, BoolT], BoolT), lambda a, b: a or b),
    _p("not", _sig([BoolT], BoolT), lambda a: not a),
    # lists
    _p("cons", _sig([_A, _LA], _LA), _cons),
    _p("snoc", _sig([_LA, _A], _LA), _snoc),
    _p("<>", _sig([_LA, _LA], _LA), lambda a, b: a + b),
    _p("head", _sig([_LA], _A), _head),
    _p("tail", _sig([_LA], _LA), _tail),
    _p("init", _sig([_LA], _LA), _init),
    _p("last", _sig([_LA], _A), _last),
    _p("null", _sig([_LA], BoolT), lambda xs: len(xs) == 0),
    _p("length", _sig([_LA], IntT), len),
    _p("delete", _sig([_A, _LA], _LA), _delete, constraints=(("a", "eq"),)),
    _p("elem", _sig([_A, _LA], BoolT), lambda x, xs: x in xs, constraints=(("a", "eq"),)),
    # tuples
    _p("fst", _sig([TupleOf(_A, _B)], _A), lambda p: p.left),
    _p("snd", _sig([TupleOf(_A, _B)], _B), lambda p: p.right),
    # association lists standing in for maps
    _p("findMap", _sig([_K, ListOf(TupleOf(_K, _V))], _V), _find_map,
       constraints=(("k", "eq"),)),
    _p("insertWith", _sig([FnOf(_V, FnOf(_V, _V)), _K, _V, ListOf(TupleOf(_K, _V))],
                          ListOf(TupleOf(_K, _V))), _insert_with,
       constraints=(("k", "eq"),)),
    # general purpose; the conditional forms are realized by the If node
    _p("if-then-else", _sig([BoolT, _A, _A], _A), None, structural=True),
    _p("case", _sig([BoolT, _A, _A], _A), None, structural=True),
    _p("uncurry", _sig([FnOf(_A, FnOf(_B, _C)), TupleOf(_A, _B)], _C),
       lambda f, p: f(p.left)(p.right)),
    _p("fromEnum", _sig([_A], IntT), _from_enum, constraints=(("a", "enum"),)),
    _p("toEnum", _sig([IntT], CharT), _to_enum),
    _p("id", _sig([_A], _A), lambda v: v),
)


_SCRABBLE = {
    "a": 1, "b": 3, "c": 3, "d": 2, "e": 1, "f": 4, "g": 2, "h": 4, "i": 1,
    "j": 8, "k": 5, "l": 1, "m": 3, "n": 1, "o": 1, "p": 3, "q": 10, "r": 1,
    "s": 1, "t": 1, "u": 1, "v": 4, "w": 4, "x": 8, "y": 4, "z": 10,
}


def scrabble_score(c: str) -> int:
    return _SCRABBLE.get(c.lower(), 0)


def is_vowel(c: str) -> bool:
    return c.lower() in "aeiouy"


def is_letter(c: str) -> bool:
    return c.isalpha()


def _const(pid, value, t, name=None):
    return Primitive(pid, name or pid, Signature((), t), None,
                     origin="user", const_value=value)


_STR = ListOf(CharT)
_USER_POOL = (
    _p("lt1000", _sig([IntT], BoolT), lambda n: n < 1000, name="(< 1000)"),
    _p("ge2000", _sig([IntT], BoolT), lambda n: n >= 2000, name="(>= 2000)"),
    _const("lit_small", "small", _STR, name='"small"'),
    _const("lit_large", "large", _STR, name='"large"'),
    _const("lit_bangs", "!!!", _STR, name='"!!!"'),
    _const("lit_ABCDF", "ABCDF", _STR, name='"ABCDF"'),
    _const("lit_ay", "ay", _STR, name='"ay"'),
    _const("lit_bang", "!", CharT, name="'!'"),
    _const("lit_space", " ", CharT, name="' '"),
    _const("lit_newline", "\n", CharT, name="'\\n'"),
    _const("lit_0", 0, IntT, name="0"),
    _const("lit_1", 1, IntT, name="1"),
    _const("lit_64", 64, IntT, name="64"),
    _p("isVowel", _sig([CharT], BoolT), is_vowel),
    _p("isLetter", _sig([CharT], BoolT), is_letter),
    _p("scrabbleScore", _sig([CharT], IntT), scrabble_score),
)
_USER_POOL = tuple(dataclasses.replace(p, origin="user") for p in _USER_POOL)

# which pool entries each registered problem's description hands the user
_USER_ASSIGNMENTS: dict[str, tuple[str, ...]] = {
    "count-odds": (),
    "double-letters": ("lit_bang", "lit_bangs", "isLetter"),
    "negative-to-zero": (),
    "replace-space-with-newline": ("lit_space", "lit_newline"),
    "scrabble-score": ("scrabbleScore",),
    "string-lengths-backwards": (),
    "syllables": ("isVowel",),
    "last-index-of-zero": (),
    "vector-average": (),
    "checksum": ("lit_64", "lit_space"),
    "for-loop-index": (),
    "collatz-numbers": (),
    "super-anagrams": (),
}


def builtin_set() -> tuple[Primitive, ...]:
    return _BUILTINS


def user_pool() -> tuple[Primitive, ...]:
    return _USER_POOL


def user_set(problem_name: str) -> tuple[Primitive, ...]:
    if problem_name not in _USER_ASSIGNMENTS:
        raise UnknownProblem(problem_name)
    wanted = _USER_ASSIGNMENTS[problem_name]
    by_id = {p.id: p for p in _USER_POOL}
    return tuple(
        dataclasses.replace(by_id[pid], origin=f"user-provided({problem_name})")
        for pid in wanted
    )


class Registry:
    """Read-only id -> Primitive mapping; built once per problem."""

    def __init__(self, prims: tuple[Primitive, ...]):
        self._by_id: dict[str, Primitive] = {}
        for p in prims:
            if p.id in self._by_id:
                raise ValueError(f"duplicate primitive id {p.id!r}")
            self._by_id[p.id] = p

    @classmethod
    def for_problem(cls, problem_name: str) -> "Registry":
        return cls(builtin_set() + user_set(problem_name))

    def __contains__(self, pid: str) -> bool:
        return pid in self._by_id

    def get(self, pid: str) -> Primitive:
        try:
            return self._by_id[pid]
        except KeyError:
            raise UnknownPrimitive(pid) from None

    def all(self) -> tuple[Primitive, ...]:
        return tuple(self._by_id.values())

    def constants(self) -> tuple[Primitive, ...]:
        return tuple(p for p in self._by_id.values() if not p.signature.params)

    def primitives_returning(
        self, target: SemType, universe: tuple[SemType, ...]
    ) -> list[tuple[Primitive, dict[str, SemType]]]:
        """Registry entries whose signatures instantiate to return target.

        The substitution covers the return-type unification; param TypeVars it
        leaves free are resolvable from `universe` (entries where some free var
        has no candidate under its constraint are dropped).
        """
        out = []
        for p in self._by_id.values():
            if p.structural:
                continue
            subst = instantiate(p.signature, target)
            if subst is None:
                continue
            ok = True
            for param in p.signature.params:
                for var in sorted(type_vars(apply_subst(param, subst))):
                    c = p.constraint_of(var)
                    if not any(satisfies(u, c) for u in universe):
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                continue
            for var, c in p.constraints:
                if var in subst and not satisfies(subst[var], c):
                    ok = False
                    break
            if ok:
                out.append((p, subst))
        return out


BUILTIN_REGISTRY = Registry(builtin_set())
