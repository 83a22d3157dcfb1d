"""Semantic types shared by expressions, primitives, templates, and problems.

Grammar (concrete syntax, right-associative arrows):

    T ::= Int | Float | Bool | Char | [T] | (T, T) | T -> T

Strings are ListOf(CharT) everywhere; there is no separate string type.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class SemType:
    pass


@dataclass(frozen=True, slots=True)
class Atom(SemType):
    name: str


@dataclass(frozen=True, slots=True)
class ListOf(SemType):
    elem: SemType


@dataclass(frozen=True, slots=True)
class TupleOf(SemType):
    left: SemType
    right: SemType


@dataclass(frozen=True, slots=True)
class FnOf(SemType):
    arg: SemType
    ret: SemType


@dataclass(frozen=True, slots=True)
class TypeVar(SemType):
    name: str


IntT = Atom("Int")
FloatT = Atom("Float")
BoolT = Atom("Bool")
CharT = Atom("Char")

BASE_TYPES = (IntT, FloatT, BoolT, CharT)
StringT = ListOf(CharT)


@dataclass(frozen=True, slots=True)
class Signature:
    """params may be empty only for constant-valued primitives."""
    params: tuple[SemType, ...]
    ret: SemType


class TypeSyntaxError(Exception):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} (at column {pos})")
        self.pos = pos


def show_type(t: SemType) -> str:
    match t:
        case Atom(name):
            return name
        case ListOf(elem):
            return f"[{show_type(elem)}]"
        case TupleOf(left, right):
            return f"({show_type(left)}, {show_type(right)})"
        case FnOf(arg, ret):
            a = show_type(arg)
            if isinstance(arg, FnOf):
                a = f"({a})"
            return f"{a} -> {show_type(ret)}"
        case TypeVar(name):
            return name
    raise AssertionError(t)


def show_signature(sig: Signature) -> str:
    parts = [show_type(p) for p in sig.params] + [show_type(sig.ret)]
    # a function-typed param would need parens, but signatures never have them
    return " -> ".join(parts)


class _TypeParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def fail(self, msg: str):
        raise TypeSyntaxError(msg, self.pos + 1)

    def parse(self) -> SemType:
        t = self.arrow()
        self.skip_ws()
        if self.pos != len(self.text):
            self.fail(f"unexpected {self.text[self.pos]!r}")
        return t

    def arrow(self) -> SemType:
        left = self.atom()
        self.skip_ws()
        if self.text.startswith("->", self.pos):
            self.pos += 2
            return FnOf(left, self.arrow())
        return left

    def atom(self) -> SemType:
        self.skip_ws()
        if self.pos >= len(self.text):
            self.fail("unexpected end of type")
        c = self.text[self.pos]
        if c == "[":
            self.pos += 1
            inner = self.arrow()
            self.skip_ws()
            if self.pos >= len(self.text) or self.text[self.pos] != "]":
                self.fail("expected ]")
            self.pos += 1
            return ListOf(inner)
        if c == "(":
            self.pos += 1
            first = self.arrow()
            self.skip_ws()
            if self.pos < len(self.text) and self.text[self.pos] == ",":
                self.pos += 1
                second = self.arrow()
                self.skip_ws()
                if self.pos >= len(self.text) or self.text[self.pos] != ")":
                    self.fail("expected )")
                self.pos += 1
                return TupleOf(first, second)
            if self.pos < len(self.text) and self.text[self.pos] == ")":
                self.pos += 1
                return first
            self.fail("expected , or )")
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
            self.pos += 1
        word = self.text[start:self.pos]
        if not word:
            self.fail(f"unexpected {c!r}")
        for base in BASE_TYPES:
            if word == base.name:
                return base
        if word[0].islower():
            return TypeVar(word)
        self.fail(f"unknown type {word!r}")


def parse_type(text: str) -> SemType:
    return _TypeParser(text).parse()


def parse_signature(text: str) -> Signature:
    """Unroll the arrow spine of a type into a program signature."""
    t = parse_type(text)
    params: list[SemType] = []
    while isinstance(t, FnOf):
        params.append(t.arg)
        t = t.ret
    return Signature(tuple(params), t)


def is_ground(t: SemType) -> bool:
    match t:
        case TypeVar(_):
            return False
        case ListOf(elem):
            return is_ground(elem)
        case TupleOf(left, right):
            return is_ground(left) and is_ground(right)
        case FnOf(arg, ret):
            return is_ground(arg) and is_ground(ret)
    return True


def type_vars(t: SemType) -> set[str]:
    match t:
        case TypeVar(name):
            return {name}
        case ListOf(elem):
            return type_vars(elem)
        case TupleOf(left, right):
            return type_vars(left) | type_vars(right)
        case FnOf(arg, ret):
            return type_vars(arg) | type_vars(ret)
    return set()


def apply_subst(t: SemType, subst: dict[str, SemType]) -> SemType:
    if type(t) is Atom or not subst:
        return t
    match t:
        case TypeVar(name):
            return subst.get(name, t)
        case ListOf(elem):
            return ListOf(apply_subst(elem, subst))
        case TupleOf(left, right):
            return TupleOf(apply_subst(left, subst), apply_subst(right, subst))
        case FnOf(arg, ret):
            return FnOf(apply_subst(arg, subst), apply_subst(ret, subst))
    return t


def unify(a: SemType, b: SemType, subst: dict[str, SemType]) -> dict[str, SemType] | None:
    """Extend subst so that a and b become equal, or None. Worklist, no occurs
    check needed beyond the trivial one: substitutions here map vars to ground
    types (targets and argument types are ground)."""
    work = [(a, b)]
    out = dict(subst)
    while work:
        x, y = work.pop()
        x = apply_subst(x, out)
        y = apply_subst(y, out)
        if x == y:
            continue
        if isinstance(x, TypeVar):
            if x.name in type_vars(y):
                return None
            out[x.name] = y
            continue
        if isinstance(y, TypeVar):
            if y.name in type_vars(x):
                return None
            out[y.name] = x
            continue
        match x, y:
            case (ListOf(e1), ListOf(e2)):
                work.append((e1, e2))
            case (TupleOf(l1, r1), TupleOf(l2, r2)):
                work.append((l1, l2))
                work.append((r1, r2))
            case (FnOf(a1, r1), FnOf(a2, r2)):
                work.append((a1, a2))
                work.append((r1, r2))
            case _:
                return None
    return out


def instantiate(sig: Signature, target_ret: SemType) -> dict[str, SemType] | None:
    """Most general substitution making sig.ret equal target_ret, or None.

    Params under the result may keep free TypeVars; generation resolves those
    from the problem's type universe.
    """
    return unify(sig.ret, target_ret, {})


def type_depth(t: SemType) -> int:
    match t:
        case ListOf(elem):
            return 1 + type_depth(elem)
        case TupleOf(left, right):
            return 1 + max(type_depth(left), type_depth(right))
        case FnOf(arg, ret):
            return 1 + max(type_depth(arg), type_depth(ret))
    return 0


def subterms(t: SemType) -> set[SemType]:
    out = {t}
    match t:
        case ListOf(elem):
            out |= subterms(elem)
        case TupleOf(left, right):
            out |= subterms(left) | subterms(right)
        case FnOf(arg, ret):
            out |= subterms(arg) | subterms(ret)
    return out


def type_universe(sig: Signature) -> tuple[SemType, ...]:
    """Ground types available for resolving unconstrained TypeVars: closure of
    the signature's types plus bases, depth-capped at 2 (base lists)."""
    seen: list[SemType] = []

    def add(t: SemType) -> None:
        if is_ground(t) and not isinstance(t, FnOf) and t not in seen:
            seen.append(t)

    for base in BASE_TYPES:
        add(base)
    for base in BASE_TYPES:
        add(ListOf(base))
    for t in (*sig.params, sig.ret):
        for s in sorted(subterms(t), key=show_type):
            add(s)
    return tuple(seen)


# constraint universes for polymorphic primitive variables
def is_equality_type(t: SemType) -> bool:
    """Any ground type with no function component supports == / elem / delete."""
    match t:
        case FnOf(_, _):
            return False
        case ListOf(elem):
            return is_equality_type(elem)
        case TupleOf(left, right):
            return is_equality_type(left) and is_equality_type(right)
        case TypeVar(_):
            return False
    return True


def is_ord_type(t: SemType) -> bool:
    return t in (IntT, FloatT, CharT)


def is_num_type(t: SemType) -> bool:
    return t in (IntT, FloatT)


def is_enum_type(t: SemType) -> bool:
    return t in (CharT, BoolT)


CONSTRAINT_CHECKS = {
    "eq": is_equality_type,
    "ord": is_ord_type,
    "num": is_num_type,
    "enum": is_enum_type,
}


def satisfies(t: SemType, constraint: str | None) -> bool:
    if constraint is None:
        return True
    return CONSTRAINT_CHECKS[constraint](t)
