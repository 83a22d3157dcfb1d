"""Recursion-scheme drivers over the list base functor.

The only recursion in the system lives here; evolved expressions are loop
bodies, never loops. Conceptually each driver walks ListStep layers

    NilStep | ConsStep (head, tail_result)

but the fixed point is not materialized: with lists as the single inductive
type the wrapper adds no observable behavior, so drivers recurse over native
lists directly and fmap stays internal.

    cata :: (f a b -> b) -> [a] -> b          -- right fold
    ana  :: (b -> f a b) -> b -> [a]          -- unfold
    hylo :: (f a b -> b) -> (b -> f a b) -> b -> b
    accu :: st -> (f a b -> s -> b) -> [a] -> b

Fuel is shared across all steps of one driver call; ana/hylo additionally
bound the number of unfold steps and raise/flag divergence at max_steps.
"""
from __future__ import annotations

from dataclasses import dataclass

from .exprs import DEFAULT_FUEL, Env, Expr, compile_expr
from .primitives import Registry
from .values import Diverged, Value


@dataclass(frozen=True, slots=True)
class NilStep:
    pass


@dataclass(frozen=True, slots=True)
class ConsStep:
    head: Value
    tail_result: Value


@dataclass(frozen=True, slots=True)
class AccuState:
    state: Value


DEFAULT_MAX_STEPS = 10_000


def _env_values(extra_env: Env | dict) -> dict:
    return dict(extra_env.values if isinstance(extra_env, Env) else extra_env)


# internal drivers over precompiled bodies; templates.assemble calls these
# directly so slot compilation happens once per genome, not once per case

def cata_c(nil_c, cons_c, env: dict, items, fuel: list) -> Value:
    acc = nil_c(env, fuel)
    for x in reversed(items):
        env["x"] = x
        env["xs"] = acc
        acc = cons_c(env, fuel)
    return acc


def cata_fn_c(nil_c, cons_c, env: dict, items, fuel: list) -> Value:
    """Function-generating fold: the result of each layer is an FnV taking the
    second list (ys); xs is bound to the suffix closure."""
    def nil_fn(ys, _env=dict(env)):
        e = dict(_env)
        e["ys"] = ys
        return nil_c(e, fuel)

    acc = nil_fn
    for x in reversed(items):
        def cons_fn(ys, _env=dict(env), _x=x, _xs=acc):
            e = dict(_env)
            e["x"] = _x
            e["xs"] = _xs
            e["ys"] = ys
            return cons_c(e, fuel)
        acc = cons_fn
    return acc


def ana_c(stop_c, elem_c, next_c, seed: Value, env: dict, max_steps: int,
          fuel: list) -> tuple[list, bool]:
    out: list[Value] = []
    steps = 0
    while True:
        env["seed"] = seed
        if stop_c(env, fuel):
            return out, False
        if steps >= max_steps:
            return out, True
        out.append(elem_c(env, fuel))
        seed = next_c(env, fuel)
        steps += 1


def hylo_c(stop_c, elem_c, next_c, nil_c, cons_c, seed: Value, env: dict,
           max_steps: int, fuel: list) -> Value:
    items, diverged = ana_c(stop_c, elem_c, next_c, seed, env, max_steps, fuel)
    if diverged:
        raise Diverged(f"unfold exceeded {max_steps} steps")
    return cata_c(nil_c, cons_c, env, items, fuel)


def accu_c(init_c, step_c, nil_c, cons_c, env: dict, items, fuel: list,
           state_vars: tuple[str, ...] = ("s",)) -> Value:
    def bind_state(s: Value) -> None:
        if len(state_vars) == 1:
            env[state_vars[0]] = s
        else:
            env[state_vars[0]] = s.left
            env[state_vars[1]] = s.right

    s = init_c(env, fuel)
    states = [s]
    for x in items:
        env["x"] = x
        bind_state(s)
        s = step_c(env, fuel)
        states.append(s)
    bind_state(states[-1])
    acc = nil_c(env, fuel)
    for i in range(len(items) - 1, -1, -1):
        env["x"] = items[i]
        env["xs"] = acc
        bind_state(states[i])
        acc = cons_c(env, fuel)
    return acc


# public Expr-level drivers

def run_cata(nil_body: Expr, cons_body: Expr, extra_env: Env | dict,
             input: list | tuple | str, fuel: int = DEFAULT_FUEL,
             registry: Registry | None = None,
             fn_param: str | None = None) -> Value:
    """Right fold: r_n = eval(nil), r_i = eval(cons)[x -> input_i, xs -> r_i+1].

    With fn_param set (the function-generating template) the returned Value is
    an FnV and both bodies see the eventual argument bound to fn_param.
    """
    env = _env_values(extra_env)
    cell = [fuel]
    nil_c = compile_expr(nil_body, registry)
    cons_c = compile_expr(cons_body, registry)
    if fn_param is not None:
        if fn_param != "ys":
            raise ValueError("function-generating fold binds its argument as ys")
        return cata_fn_c(nil_c, cons_c, env, input, cell)
    return cata_c(nil_c, cons_c, env, input, cell)


def run_ana(stop_pred: Expr, elem_body: Expr, next_seed_body: Expr,
            seed: Value, extra_env: Env | dict,
            max_steps: int = DEFAULT_MAX_STEPS, fuel: int = DEFAULT_FUEL,
            registry: Registry | None = None) -> tuple[tuple, bool]:
    """Unfold from seed; stop checked before each emit; diverged flag iff
    max_steps emissions happen without the stop predicate holding."""
    env = _env_values(extra_env)
    cell = [fuel]
    out, diverged = ana_c(
        compile_expr(stop_pred, registry),
        compile_expr(elem_body, registry),
        compile_expr(next_seed_body, registry),
        seed, env, max_steps, cell,
    )
    return tuple(out), diverged


def run_hylo(stop_pred: Expr, elem_body: Expr, next_seed_body: Expr,
             nil_body: Expr, cons_body: Expr, seed: Value,
             extra_env: Env | dict, max_steps: int = DEFAULT_MAX_STEPS,
             fuel: int = DEFAULT_FUEL, registry: Registry | None = None) -> Value:
    """Unfold then fold, without keeping the intermediate structure alive
    longer than the call; extensionally equal to run_cata over run_ana's
    output whenever the unfold terminates. Raises Diverged at max_steps."""
    env = _env_values(extra_env)
    cell = [fuel]
    return hylo_c(
        compile_expr(stop_pred, registry),
        compile_expr(elem_body, registry),
        compile_expr(next_seed_body, registry),
        compile_expr(nil_body, registry),
        compile_expr(cons_body, registry),
        seed, env, max_steps, cell,
    )


def run_accu(init_state: Expr, step_body: Expr, nil_body: Expr,
             cons_body: Expr, extra_env: Env | dict, input,
             fuel: int = DEFAULT_FUEL, registry: Registry | None = None,
             state_vars: tuple[str, ...] = ("s",)) -> Value:
    """Fold with a left-threaded accumulator: s_0 = eval(init),
    s_i+1 = eval(step)[x -> input_i, s -> s_i]; then a right fold where
    nil sees s_n and cons at position i sees s_i. A pair-typed state is
    destructured when state_vars names two components (s1, s2)."""
    env = _env_values(extra_env)
    cell = [fuel]
    return accu_c(
        compile_expr(init_state, registry),
        compile_expr(step_body, registry),
        compile_expr(nil_body, registry),
        compile_expr(cons_body, registry),
        env, input, cell, state_vars,
    )
