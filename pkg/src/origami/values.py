"""Runtime values and evaluation signals.

Value representation (static types rule; tags are native):
  IntT    -> int            FloatT -> float
  BoolT   -> bool           CharT  -> str of length 1
  [Char]  -> str            [T]    -> tuple of values (T /= Char)
  (A, B)  -> Pair           A -> B -> FnV (opaque callable, never serialized)
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from .types import Atom, CharT, FnOf, ListOf, SemType, TupleOf

Value = Any
FnV = Callable[[Value], Value]


@dataclass(frozen=True, slots=True)
class Pair:
    left: Value
    right: Value


class EvalSignal(Exception):
    """Base of all in-band evaluation outcomes scored as failed cases."""


class FuelExhausted(EvalSignal):
    pass


class RuntimePartial(EvalSignal):
    """A partial primitive was applied outside its domain (head [], div by 0, ...)."""


class Diverged(EvalSignal):
    """An unfold hit max_steps before its stop predicate held."""


def value_conforms(v: Value, t: SemType) -> bool:
    """Runtime tag check used by soundness tests; not on the hot path."""
    match t:
        case Atom("Int"):
            return type(v) is int
        case Atom("Float"):
            return type(v) is float
        case Atom("Bool"):
            return type(v) is bool
        case Atom("Char"):
            return type(v) is str and len(v) == 1
        case ListOf(elem):
            if elem == CharT:
                return type(v) is str
            return type(v) is tuple and all(value_conforms(x, elem) for x in v)
        case TupleOf(left, right):
            return type(v) is Pair and value_conforms(v.left, left) and value_conforms(v.right, right)
        case FnOf(_, _):
            return callable(v)
    return False


def default_value(t: SemType) -> Value:
    """The empty/neutral value per type: 0, 0.0, False, ' ', empty list."""
    match t:
        case Atom("Int"):
            return 0
        case Atom("Float"):
            return 0.0
        case Atom("Bool"):
            return False
        case Atom("Char"):
            return " "
        case ListOf(elem):
            return "" if elem == CharT else ()
        case TupleOf(left, right):
            return Pair(default_value(left), default_value(right))
    raise ValueError(f"no default value for {t}")
