import pytest

from origami.exprs import parse_expr
from origami.primitives import BUILTIN_REGISTRY
from origami.synth import Genome
from origami.templates import (
    AssembleError, SchemeKind, Template, TemplateError, TemplateKind,
    assemble, build_template, candidate_schemes, candidate_template_kinds,
    constant_pool, default_expr, fixed_nil_slots, template_kind_from_label,
    value_to_expr,
)
from origami.types import (
    BoolT, CharT, FloatT, FnOf, IntT, ListOf, Signature, TupleOf, parse_type,
)
from origami.values import Diverged, Pair, RuntimePartial


def sig(text: str) -> Signature:
    from origami.types import parse_signature
    return parse_signature(text)


def genome_for(template: Template, texts: dict[str, str],
               seed_gene=None) -> Genome:
    exprs = {}
    for s in template.slots:
        exprs[s.name] = parse_expr(texts[s.name], s.return_type, s.vars)
    return Genome(exprs, seed_gene)


# signature routing

def test_routing_list_param_folds():
    assert candidate_schemes(sig("[Int] -> Int")) == \
        (SchemeKind.CATA, SchemeKind.ACCU)
    assert candidate_schemes(sig("[Char] -> Int -> [Char]")) == \
        (SchemeKind.CATA, SchemeKind.ACCU)


def test_routing_scalars_to_list_unfolds():
    assert candidate_schemes(sig("Int -> [Int]")) == (SchemeKind.ANA,)
    assert candidate_schemes(sig("Int -> Int -> Int -> [Int]")) == \
        (SchemeKind.ANA,)


def test_routing_scalar_to_scalar_is_hylo():
    assert candidate_schemes(sig("Int -> Int")) == (SchemeKind.HYLO,)
    assert candidate_schemes(sig("Float -> Int -> Bool")) == (SchemeKind.HYLO,)


def test_routing_no_params_routes_nowhere():
    assert candidate_schemes(Signature((), IntT)) == ()


def test_template_kind_refinement():
    assert candidate_template_kinds(sig("[Int] -> Int")) == \
        (TemplateKind.CATA_REDUCE, TemplateKind.ACCU_INDEX,
         TemplateKind.ACCU_COMBINE)
    assert candidate_template_kinds(sig("[Int] -> [Int]"))[0] == \
        TemplateKind.CATA_MAP
    assert candidate_template_kinds(sig("[Char] -> [Char] -> Bool"))[0] == \
        TemplateKind.CATA_FN
    assert candidate_template_kinds(sig("[Float] -> (Int, Float)"))[0] == \
        TemplateKind.CATA_TUPLE
    assert candidate_template_kinds(sig("Int -> Int -> Int -> [Int]")) == \
        (TemplateKind.ANA_STD,)
    assert candidate_template_kinds(sig("Int -> Int")) == \
        (TemplateKind.HYLO_STD,)


def test_template_kind_labels_round_trip():
    for kind in TemplateKind:
        assert template_kind_from_label(kind.value) is kind
    with pytest.raises(ValueError):
        template_kind_from_label("cata")


# slot structure

def test_cata_reduce_slots():
    t = build_template(TemplateKind.CATA_REDUCE, sig("[Int] -> Int -> Int"))
    assert t.slot_names() == ("nil", "cons")
    assert t.consumed_index == 0 and t.elem_type == IntT
    assert t.slot("nil").vars == {"arg1": IntT}
    assert t.slot("cons").vars == {"arg1": IntT, "x": IntT, "xs": IntT}
    assert not t.slot("cons").restricted


def test_cata_fn_slots():
    t = build_template(TemplateKind.CATA_FN, sig("[Char] -> [Char] -> Bool"))
    assert t.fn_list_index == 1
    cons = t.slot("cons")
    assert cons.vars["xs"] == FnOf(ListOf(CharT), BoolT)
    assert cons.vars["ys"] == ListOf(CharT)
    with pytest.raises(TemplateError):
        build_template(TemplateKind.CATA_FN, sig("[Char] -> Bool"))


def test_ana_slots_and_seed_domain():
    t = build_template(TemplateKind.ANA_STD, sig("Int -> Int -> [Int]"))
    assert t.slot_names() == ("stop", "elem", "next")
    assert t.slot("stop").restricted and t.slot("stop").return_type == BoolT
    assert t.slot("next").vars == {"arg0": IntT, "arg1": IntT, "seed": IntT}
    assert ("arg", 0) in t.seed_gene_domain and ("arg", 1) in t.seed_gene_domain
    assert ("const", 0) in t.seed_gene_domain


def test_hylo_slots():
    t = build_template(TemplateKind.HYLO_STD, sig("Int -> Int"))
    assert t.slot_names() == ("stop", "elem", "next", "nil", "cons")
    assert t.seed_type == IntT
    assert t.slot("cons").vars == {"arg0": IntT, "x": IntT, "xs": IntT}


def test_accu_slots():
    t = build_template(TemplateKind.ACCU_INDEX, sig("[Float] -> Float"))
    assert t.slot_names() == ("init", "step", "nil", "cons")
    assert t.slot("step").vars == {"x": FloatT, "s": IntT}
    t2 = build_template(TemplateKind.ACCU_COMBINE, sig("[Float] -> Float"))
    assert t2.slot_names() == ("init", "step", "nil")
    assert t2.slot("init").return_type == TupleOf(FloatT, FloatT)
    assert t2.slot("nil").vars == {"s1": FloatT, "s2": FloatT}


def test_incompatible_shapes_are_rejected():
    with pytest.raises(TemplateError):
        build_template(TemplateKind.CATA_REDUCE, sig("Int -> Int"))
    with pytest.raises(TemplateError):
        build_template(TemplateKind.CATA_MAP, sig("[Int] -> Int"))
    with pytest.raises(TemplateError):
        build_template(TemplateKind.CATA_TUPLE, sig("[Int] -> Int"))
    with pytest.raises(TemplateError):
        build_template(TemplateKind.ANA_STD, sig("Int -> Int"))
    with pytest.raises(TemplateError):
        build_template(TemplateKind.CATA_REDUCE, Signature((), IntT))


def test_fixed_nil_slots_policy():
    reduce_t = build_template(TemplateKind.CATA_REDUCE, sig("[Int] -> Int"))
    tuple_t = build_template(TemplateKind.CATA_TUPLE, sig("[Int] -> (Int, Int)"))
    accu_t = build_template(TemplateKind.ACCU_INDEX, sig("[Int] -> Int"))
    assert fixed_nil_slots(reduce_t, True) == {"nil"}
    assert fixed_nil_slots(tuple_t, True) == {"nil1", "nil2"}
    assert fixed_nil_slots(reduce_t, False) == frozenset()
    assert fixed_nil_slots(accu_t, True) == frozenset()


# assembled programs, one per kind

def test_program_cata_reduce():
    t = build_template(TemplateKind.CATA_REDUCE, sig("[Int] -> Int"))
    g = genome_for(t, {"nil": "0", "cons": "(+ x xs)"})
    p = assemble(t, g)
    assert p(((1, 2, 3),)) == 6
    assert p(((),)) == 0


def test_program_cata_map():
    t = build_template(TemplateKind.CATA_MAP, sig("[Int] -> [Int]"))
    g = genome_for(t, {"nil": "(empty Int)", "cons": "(cons (* 2 x) xs)"})
    assert assemble(t, g)(((3, 4),)) == (6, 8)


def test_program_cata_fn():
    t = build_template(TemplateKind.CATA_FN, sig("[Int] -> [Int] -> Int"))
    g = genome_for(t, {"nil": "(length ys)", "cons": "(+ x (xs ys))"})
    p = assemble(t, g)
    assert p(((1, 2, 3), (9, 9))) == 8  # sum of first plus length of second


def test_program_cata_tuple():
    t = build_template(TemplateKind.CATA_TUPLE, sig("[Int] -> (Int, Int)"))
    g = genome_for(t, {"nil1": "0", "cons1": "(+ x xs)",
                       "nil2": "0", "cons2": "(+ 1 xs)"})
    assert assemble(t, g)(((1, 2, 3),)) == Pair(6, 3)


def test_program_ana():
    t = build_template(TemplateKind.ANA_STD, sig("Int -> [Int]"))
    g = genome_for(t, {"stop": "(<= seed 0)", "elem": "seed",
                       "next": "(- seed 1)"}, seed_gene=("arg", 0))
    assert assemble(t, g)((3,)) == (3, 2, 1)


def test_program_ana_char_elements_make_a_string():
    t = build_template(TemplateKind.ANA_STD, sig("Int -> [Char]"))
    g = genome_for(t, {"stop": "(<= seed 0)", "elem": "'a'",
                       "next": "(- seed 1)"}, seed_gene=("arg", 0))
    assert assemble(t, g)((3,)) == "aaa"


def test_program_ana_divergence():
    t = build_template(TemplateKind.ANA_STD, sig("Int -> [Int]"))
    g = genome_for(t, {"stop": "false", "elem": "seed", "next": "seed"},
                   seed_gene=("const", 0))
    with pytest.raises(Diverged):
        assemble(t, g, max_steps=30)((1,))


def test_program_hylo():
    t = build_template(TemplateKind.HYLO_STD, sig("Int -> Int"))
    g = genome_for(t, {"stop": "(<= seed 0)", "elem": "seed",
                       "next": "(- seed 1)", "nil": "0", "cons": "(+ x xs)"},
                   seed_gene=("arg", 0))
    assert assemble(t, g)((5,)) == 15


def test_program_accu_index():
    t = build_template(TemplateKind.ACCU_INDEX, sig("[Int] -> Int"))
    g = genome_for(t, {"init": "0", "step": "(+ s 1)",
                       "nil": "(- 0 1)", "cons": "(if (== x 0) s xs)"})
    p = assemble(t, g)
    # the right fold applies cons at index 0 last, so this finds the first zero
    assert p(((5, 0, 7, 0),)) == 1
    assert p(((1, 2),)) == -1


def test_program_accu_combine():
    t = build_template(TemplateKind.ACCU_COMBINE, sig("[Float] -> Float"))
    g = genome_for(t, {"init": "(pair 0.0 0.0)",
                       "step": "(pair (+ s1 x) (+ s2 1.0))",
                       "nil": "(/ s1 s2)"})
    p = assemble(t, g)
    assert p(((1.0, 2.0, 3.0),)) == 2.0
    with pytest.raises(RuntimePartial):
        p(((),))  # 0/0 in the combiner


def test_program_rejects_wrong_arity():
    t = build_template(TemplateKind.CATA_REDUCE, sig("[Int] -> Int"))
    p = assemble(t, genome_for(t, {"nil": "0", "cons": "(+ x xs)"}))
    with pytest.raises(AssembleError):
        p(((1, 2), 3))


# assembly validation

def test_assemble_rejects_wrong_slot_set():
    t = build_template(TemplateKind.CATA_REDUCE, sig("[Int] -> Int"))
    g = genome_for(t, {"nil": "0", "cons": "(+ x xs)"})
    with pytest.raises(AssembleError):
        assemble(t, Genome({"nil": g.slot_exprs["nil"]}))


def test_assemble_rejects_ill_typed_slot():
    t = build_template(TemplateKind.CATA_REDUCE, sig("[Int] -> Int"))
    bad = parse_expr("true", BoolT, {})
    g = Genome({"nil": bad, "cons": parse_expr("(+ x xs)", IntT,
                                               {"x": IntT, "xs": IntT})})
    with pytest.raises(AssembleError):
        assemble(t, g)
    # the search loop's own offspring skip the recheck
    p = assemble(t, g, validate=False)
    assert p.template is t


def test_assemble_checks_seed_genes():
    t = build_template(TemplateKind.ANA_STD, sig("Int -> [Int]"))
    texts = {"stop": "(<= seed 0)", "elem": "seed", "next": "(- seed 1)"}
    with pytest.raises(AssembleError):
        assemble(t, genome_for(t, texts))  # missing
    with pytest.raises(AssembleError):
        assemble(t, genome_for(t, texts, seed_gene=("arg", 3)))
    with pytest.raises(AssembleError):
        assemble(t, genome_for(t, texts, seed_gene=("const", "zz")))
    with pytest.raises(AssembleError):
        assemble(t, genome_for(t, texts, seed_gene=("env", 0)))
    cata = build_template(TemplateKind.CATA_REDUCE, sig("[Int] -> Int"))
    g = genome_for(cata, {"nil": "0", "cons": "(+ x xs)"},
                   seed_gene=("const", 1))
    with pytest.raises(AssembleError):
        assemble(cata, g)


# literal helpers

def test_value_to_expr_round_trips():
    from origami.exprs import eval_expr
    cases = [
        (42, IntT), (2.5, FloatT), (True, BoolT), ("k", CharT),
        ("ab", ListOf(CharT)), ((1, 2), ListOf(IntT)),
        (Pair(1, "x"), TupleOf(IntT, ListOf(CharT))),
        (((1,), ()), ListOf(ListOf(IntT))),
    ]
    for v, t in cases:
        assert eval_expr(value_to_expr(v, t), {}) == v


def test_default_expr_matches_type_defaults():
    from origami.exprs import render
    assert render(default_expr(IntT)) == "0"
    assert render(default_expr(parse_type("[Char]"))) == '""'
    assert render(default_expr(parse_type("[Int]"))) == "(empty Int)"


def test_constant_pool_includes_user_constants():
    assert constant_pool(IntT) == (0, 1, 2, 3)
    reg = BUILTIN_REGISTRY.for_problem("checksum")
    assert 64 in constant_pool(IntT, reg)
    assert constant_pool(BoolT) == (False, True)
