import random

import pytest

from origami.exprs import eval_expr, parse_expr, size
from origami.schemes import (
    DEFAULT_MAX_STEPS, run_accu, run_ana, run_cata, run_hylo,
)
from origami.types import (
    BoolT, IntT, ListOf, SemType, TupleOf, parse_type,
)
from origami.values import Diverged, FuelExhausted, Pair


def pe(text: str, expected, var_types: dict[str, SemType]):
    if isinstance(expected, str):
        expected = parse_type(expected)
    return parse_expr(text, expected, var_types)


def cata_bodies(nil: str, cons: str, elem="Int", ret="Int"):
    et, rt = parse_type(elem), parse_type(ret)
    return (pe(nil, rt, {}), pe(cons, rt, {"x": et, "xs": rt}))


# cata

def test_cata_is_a_right_fold():
    nil, cons = cata_bodies("0", "(+ x xs)")
    assert run_cata(nil, cons, {}, [1, 2, 3, 4]) == 10
    assert run_cata(nil, cons, {}, []) == 0
    # non-commutative op exposes the direction: 1-(2-(3-0)) = 2
    nil, cons = cata_bodies("0", "(- x xs)")
    assert run_cata(nil, cons, {}, [1, 2, 3]) == 2


def test_cata_rebuilds_lists_and_strings():
    nil, cons = cata_bodies("(empty Int)", "(cons x xs)", ret="[Int]")
    assert run_cata(nil, cons, {}, (5, 6)) == (5, 6)
    nil, cons = cata_bodies('""', "(cons x xs)", elem="Char", ret="[Char]")
    assert run_cata(nil, cons, {}, "abc") == "abc"


def test_cata_matches_direct_recursion_fuzz():
    nil, cons = cata_bodies("1", "(* x xs)")
    n_env, c_env = {}, {}

    def ref(xs):
        if not xs:
            return eval_expr(nil, n_env)
        c_env["x"], c_env["xs"] = xs[0], ref(xs[1:])
        return eval_expr(cons, c_env)

    rng = random.Random(4)
    for _ in range(200):
        xs = [rng.randint(-9, 9) for _ in range(rng.randrange(8))]
        assert run_cata(nil, cons, {}, xs) == ref(xs)


def test_cata_fn_layers_close_over_their_suffix():
    # fold [Char] into a function that appends its argument
    vt = {"x": parse_type("Char"), "xs": parse_type("[Char] -> [Char]"),
          "ys": parse_type("[Char]")}
    nil = pe("ys", "[Char]", {"ys": parse_type("[Char]")})
    cons = pe("(cons x (xs ys))", "[Char]", vt)
    fn = run_cata(nil, cons, {}, "abc", fn_param="ys")
    assert fn("xy") == "abcxy"
    assert fn("") == "abc"
    with pytest.raises(ValueError):
        run_cata(nil, cons, {}, "abc", fn_param="zs")


# ana

def ana_bodies(stop: str, elem: str, nxt: str, seed_t="Int", elem_t="Int"):
    st = parse_type(seed_t)
    vt = {"seed": st}
    return (pe(stop, BoolT, vt), pe(elem, parse_type(elem_t), vt),
            pe(nxt, st, vt))


def test_ana_unfolds_until_stop():
    stop, elem, nxt = ana_bodies("(<= seed 0)", "seed", "(- seed 1)")
    assert run_ana(stop, elem, nxt, 5, {}) == ((5, 4, 3, 2, 1), False)


def test_ana_checks_stop_before_emitting():
    stop, elem, nxt = ana_bodies("(<= seed 0)", "(div 1 seed)", "(- seed 1)")
    # elem would divide by zero if it ran on the stopping seed
    assert run_ana(stop, elem, nxt, 0, {}) == ((), False)


def test_ana_flags_divergence_at_max_steps():
    stop, elem, nxt = ana_bodies("false", "seed", "(+ seed 1)")
    out, diverged = run_ana(stop, elem, nxt, 0, {}, max_steps=17)
    assert diverged and out == tuple(range(17))
    assert DEFAULT_MAX_STEPS == 10_000


# hylo

def test_hylo_equals_cata_after_ana_fuzz():
    stop, elem, nxt = ana_bodies("(<= seed 0)", "(* seed seed)", "(- seed 2)")
    nil, cons = cata_bodies("0", "(+ x xs)")
    rng = random.Random(11)
    for _ in range(200):
        seed = rng.randint(-3, 40)
        items, diverged = run_ana(stop, elem, nxt, seed, {})
        assert not diverged
        assert run_hylo(stop, elem, nxt, nil, cons, seed, {}) == \
            run_cata(nil, cons, {}, items)


def test_hylo_raises_diverged():
    stop, elem, nxt = ana_bodies("false", "seed", "seed")
    nil, cons = cata_bodies("0", "(+ x xs)")
    with pytest.raises(Diverged):
        run_hylo(stop, elem, nxt, nil, cons, 1, {}, max_steps=50)


# accu

def accu_bodies(init: str, step: str, nil: str, cons: str,
                state_t="Int", elem_t="Int", ret_t="Int"):
    st, et, rt = parse_type(state_t), parse_type(elem_t), parse_type(ret_t)
    sv = {"s1": st.left, "s2": st.right} if isinstance(st, TupleOf) else {"s": st}
    return (pe(init, st, {}),
            pe(step, st, {"x": et, **sv}),
            pe(nil, rt, sv),
            pe(cons, rt, {"x": et, "xs": rt, **sv}))


def test_accu_nil_sees_final_state():
    init, step, nil, cons = accu_bodies("0", "(+ s x)", "s", "xs")
    assert run_accu(init, step, nil, cons, {}, [1, 2, 3]) == 6
    assert run_accu(init, step, nil, cons, {}, []) == 0


def test_accu_cons_at_i_sees_state_i():
    # state thread: s_0=0, s_i+1 = s_i + x_i; emit each s_i going back up
    init, step, nil, cons = accu_bodies(
        "0", "(+ s x)", "(cons s (empty Int))", "(cons s xs)", ret_t="[Int]")
    assert run_accu(init, step, nil, cons, {}, [1, 2, 3]) == (0, 1, 3, 6)


def test_accu_pair_state_destructures():
    init, step, nil, cons = accu_bodies(
        "(pair 0 1)", "(pair (+ s1 1) (* s2 2))", "(pair s1 s2)", "xs",
        state_t="(Int, Int)", ret_t="(Int, Int)")
    got = run_accu(init, step, nil, cons, {}, [7, 7, 7],
                   state_vars=("s1", "s2"))
    assert got == Pair(3, 8)


def test_accu_matches_direct_recursion_fuzz():
    init, step, nil, cons = accu_bodies(
        "1", "(+ s s)", "s", "(+ (* x s) xs)")

    def ref(xs):
        states = [1]
        for x in xs:
            states.append(states[-1] + states[-1])
        acc = states[len(xs)]
        for i in range(len(xs) - 1, -1, -1):
            acc = xs[i] * states[i] + acc
        return acc

    rng = random.Random(23)
    for _ in range(200):
        xs = [rng.randint(-5, 5) for _ in range(rng.randrange(7))]
        assert run_accu(init, step, nil, cons, {}, xs) == ref(xs)


# fuel

def test_fuel_charges_per_body_invocation():
    nil, cons = cata_bodies("0", "(+ x xs)")
    items = [1, 2, 3, 4, 5]
    needed = size(nil) + len(items) * size(cons)
    assert run_cata(nil, cons, {}, items, fuel=needed) == 15
    with pytest.raises(FuelExhausted):
        run_cata(nil, cons, {}, items, fuel=needed - 1)


def test_ana_fuel_covers_the_failed_stop_check_too():
    stop, elem, nxt = ana_bodies("(<= seed 0)", "seed", "(- seed 1)")
    per_step = size(stop) + size(elem) + size(nxt)
    needed = 3 * per_step + size(stop)
    assert run_ana(stop, elem, nxt, 3, {}, fuel=needed)[0] == (3, 2, 1)
    with pytest.raises(FuelExhausted):
        run_ana(stop, elem, nxt, 3, {}, fuel=needed - 1)


def test_sequence_growth_is_charged_against_fuel():
    # a doubling accumulator allocates 2^k cells in k cheap calls; without
    # a per-cell charge this fold would try to build a 2^64-element list
    nil, cons = cata_bodies("(cons 0 (empty Int))", "(<> xs xs)", ret="[Int]")
    with pytest.raises(FuelExhausted):
        run_cata(nil, cons, {}, list(range(64)), fuel=100_000)
    # the charge is one unit per constructed cell, on top of the flat cost
    e = pe("(<> xs xs)", "[Int]", {"xs": parse_type("[Int]")})
    xs = tuple(range(100))
    assert len(eval_expr(e, {"xs": xs}, fuel=size(e) + 200)) == 200
    with pytest.raises(FuelExhausted):
        eval_expr(e, {"xs": xs}, fuel=size(e) + 199)
