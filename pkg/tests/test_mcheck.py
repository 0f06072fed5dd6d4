import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from lfdgf.mcheck import (LfdEvaluator, agreement_set, check_dep_bisim, dep_closure, eval_fo, eval_lfd,
                          greatest_dep_bisim)
from lfdgf.models import DependenceModel, StandardModel, distinguish, full_F
from lfdgf.oracle import random_dependence_model, random_gf, random_lfd
from lfdgf.syntax import Signature, fo, lfd, parse_fo, parse_lfd

SIG = Signature({"P": 1, "Q": 2}, ("x", "y"))


def naive(model, s, f):
    """Reference semantics, clause by clause, with no caching or bitsets."""
    sd = dict(zip(model.vars, s))
    if isinstance(f, lfd.Atom):
        return tuple(sd[v] for v in f.args) in model.base.relations[f.pred]
    if isinstance(f, lfd.Not):
        return not naive(model, s, f.sub)
    if isinstance(f, lfd.And):
        return naive(model, s, f.left) and naive(model, s, f.right)
    same = [t for t in model.team if all(dict(zip(model.vars, t))[v] == sd[v] for v in f.vars)]
    if isinstance(f, lfd.Dep):
        return all(dict(zip(model.vars, t))[f.target] == sd[f.target] for t in same)
    return any(naive(model, t, f.body) for t in same)


def dm(domain, rels, team, vars_):
    return DependenceModel(StandardModel.build(domain, rels, {n: SIG.relations[n] for n in rels}), vars_, team)


@settings(max_examples=300, deadline=None)
@given(st.randoms(use_true_random=False))
def test_eval_lfd_matches_reference(rng):
    m = random_dependence_model(rng, SIG)
    f = random_lfd(rng, SIG, size=7, e_depth=3)
    ev = LfdEvaluator(m)
    for s in m.team:
        assert ev.holds(s, f) == naive(m, s, f)


def test_existential_reads_the_whole_team():
    m = dm(["a", "b"], {"P": [("a",)]}, [("a", "b")], ("x", "y"))
    s = ("a", "b")
    assert eval_lfd(m, s, parse_lfd("E[] P(x)"))
    assert not eval_lfd(m, s, parse_lfd("E[] P(y)"))


def test_projection_always_holds():
    m = random_dependence_model(random.Random(3), SIG)
    for s in m.team:
        for V in SIG.subsets():
            for u in V:
                assert eval_lfd(m, s, lfd.Dep(V, u))


def test_two_values_break_constancy():
    m = dm(["a", "b"], {}, [("a",), ("b",)], ("x",))
    assert not any(eval_lfd(m, s, parse_lfd("D[] x")) for s in m.team)


def test_eval_fo_examples():
    M = StandardModel.build(["a", "b"], {"P": [("a",)]})
    assert eval_fo(M, {}, parse_fo("exists x . P(x)"))
    assert not eval_fo(M, {}, parse_fo("exists x . P(x) & ~exists y . P(y)"))
    assert eval_fo(M, {"x": "a", "y": "a"}, parse_fo("x = y", equality=True))


@settings(max_examples=100, deadline=None)
@given(st.randoms(use_true_random=False))
def test_forall_sugar_agrees(rng):
    pairs = [p for p in product("ab", repeat=2) if rng.random() < 0.5]
    M = StandardModel.build(["a", "b"], {"G": pairs, "P": [("a",)] if rng.random() < 0.5 else []},
                            {"G": 2, "P": 1})
    a = parse_fo("forall y . (G(x,y) -> P(y))")
    b = fo.Not(fo.Exists(("y",), fo.And(fo.Atom("G", ("x", "y")), fo.Not(fo.Atom("P", ("y",))))))
    for x in "ab":
        assert eval_fo(M, {"x": x}, a) == eval_fo(M, {"x": x}, b)


def test_dep_closure_examples():
    single = dm(["a"], {}, [("a", "a")], ("x", "y"))
    assert dep_closure(single, ("a", "a"), set()) == {"x", "y"}
    full = full_F(StandardModel.build(["a", "b"], {}, {}), ("x", "y"))
    for s in full.team:
        assert dep_closure(full, s, {"x"}) == {"x"}


@settings(max_examples=150, deadline=None)
@given(st.randoms(use_true_random=False))
def test_dep_closure_is_a_closure_operator(rng):
    m = random_dependence_model(rng, SIG)
    for s in m.team:
        for V in SIG.subsets():
            c = dep_closure(m, s, V)
            assert V <= c
            assert dep_closure(m, s, c) == c
            for W in SIG.subsets():
                if V <= W:
                    assert c <= dep_closure(m, s, W)


@settings(max_examples=150, deadline=None)
@given(st.randoms(use_true_random=False))
def test_locality(rng):
    m = random_dependence_model(rng, SIG)
    f = random_lfd(rng, SIG, size=6)
    X = lfd.free_vars(f)
    ev = LfdEvaluator(m)
    for s in m.team:
        for t in m.team:
            if X <= agreement_set(m.as_dict(s), m.as_dict(t)):
                assert ev.holds(s, f) == ev.holds(t, f)


def test_identity_is_a_bisimulation():
    m = random_dependence_model(random.Random(5), SIG)
    assert check_dep_bisim(m, m, [(s, s) for s in m.team]).ok


def test_distinguish_relation_is_a_bisimulation():
    m = random_dependence_model(random.Random(6), SIG)
    md, Z = distinguish(m)
    assert check_dep_bisim(m, md, Z).ok


def test_atom_clash_is_reported():
    m1 = dm(["a"], {"P": [("a",)]}, [("a",)], ("x",))
    m2 = dm(["a"], {"P": []}, [("a",)], ("x",))
    v = check_dep_bisim(m1, m2, [(("a",), ("a",))])
    assert not v.ok and v.clause == "atom"


def test_greatest_contains_identity_and_finds_distinguished():
    rng = random.Random(8)
    m = random_dependence_model(rng, SIG)
    Z = greatest_dep_bisim(m, m)
    assert {(s, s) for s in m.team} <= set(Z)
    md, _ = distinguish(m)
    assert greatest_dep_bisim(m, md) is not None


def test_greatest_is_none_when_a_sentence_separates():
    m1 = dm(["a", "b"], {"P": [("a",)]}, [("a",), ("b",)], ("x",))
    m2 = dm(["a"], {"P": [("a",)]}, [("a",)], ("x",))
    f = parse_lfd("E[] ~P(x)")
    assert eval_lfd(m1, ("a",), f) != eval_lfd(m2, ("a",), f)
    assert greatest_dep_bisim(m1, m2) is None


@settings(max_examples=100, deadline=None)
@given(st.randoms(use_true_random=False))
def test_bisimulation_invariance(rng):
    m1 = random_dependence_model(rng, SIG)
    m2 = random_dependence_model(rng, SIG)
    Z = greatest_dep_bisim(m1, m2)
    if Z is None:
        return
    assert check_dep_bisim(m1, m2, Z).ok
    formulas = [random_lfd(rng, SIG, size=6, e_depth=3) for _ in range(5)]
    e1, e2 = LfdEvaluator(m1), LfdEvaluator(m2)
    for s, t in Z:
        for f in formulas:
            assert e1.holds(s, f) == e2.holds(t, f)


@settings(max_examples=100, deadline=None)
@given(st.randoms(use_true_random=False))
def test_E_collapses_to_exists_on_full_models(rng):
    M = StandardModel.build(["a", "b"], {"P": [("a",)] if rng.random() < 0.5 else [],
                                         "Q": [p for p in product("ab", repeat=2) if rng.random() < 0.4]},
                            {"P": 1, "Q": 2})
    full = full_F(M, SIG)

    def strip(f):
        # keep the D-free part, with E[V] read as exists over the other variables
        if isinstance(f, lfd.Atom):
            return fo.Atom(f.pred, f.args)
        if isinstance(f, lfd.Not):
            return fo.Not(strip(f.sub))
        if isinstance(f, lfd.And):
            return fo.And(strip(f.left), strip(f.right))
        return fo.Exists(tuple(v for v in SIG.lfd_vars if v not in f.vars), strip(f.body))

    f = random_lfd(rng, SIG, size=6)
    if any(isinstance(g, lfd.Dep) for g in lfd.subformulas(f)):
        return
    g = strip(f)
    for s in full.team:
        assert eval_lfd(full, s, f) == eval_fo(M, full.as_dict(s), g)


def test_eval_fo_rejects_unbound_variables():
    M = StandardModel.build(["a"], {"P": [("a",)]})
    with pytest.raises(Exception):
        eval_fo(M, {}, parse_fo("P(x)"))
