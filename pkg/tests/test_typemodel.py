import random
from itertools import product

import pytest
from hypothesis import assume, given, settings, strategies as st

from lfdgf import config
from lfdgf.errors import PreconditionError, SizeCapError
from lfdgf.mcheck import LfdEvaluator, eval_fo, eval_lfd
from lfdgf.models import StandardModel, expand_hat
from lfdgf.oracle import brute_sat_lfd, random_dependence_model, random_lfd
from lfdgf.syntax import Signature, lfd, parse_lfd
from lfdgf.translate import tr_bullet
from lfdgf.typemodel import (H, Type, TypeModel, build_type_model, closure_operators, closure_table,
                             enumerate_types, is_type, is_type_model, literal_truth_lemma, sat_lfd,
                             truth_report, type_of, unravel)

S1 = Signature({"P": 1}, ("x",))
S2 = Signature({"P": 1, "Q": 2}, ("x", "y"))


# reference definitions over sets of formulas


def dep_closure_of(delta, V, sig):
    return {u for u in sig.lfd_vars if lfd.Dep(V, u) in delta}


def brute_types(psi, sig):
    """All subsets of the closure meeting the five type conditions, by filtering."""
    cl = lfd.closure(psi, sig)
    positive = [f for f in cl if not isinstance(f, lfd.Not)]
    subsets = sig.subsets()
    out = []
    for choice in product([False, True], repeat=len(positive)):
        delta = {f for f, keep in zip(positive, choice) if keep}
        for f in cl:  # subformulas come first, so nested negations resolve in order
            if isinstance(f, lfd.Not) and f.sub not in delta:
                delta.add(f)
        ok = all((f in delta) == (f.left in delta and f.right in delta) for f in cl if isinstance(f, lfd.And))
        ok = ok and all(f in delta for f in cl if isinstance(f, lfd.E) and f.body in delta)
        ok = ok and all(lfd.Dep(V, u) in delta for V in subsets for u in V)
        for V, U, W in product(subsets, repeat=3):
            if U <= dep_closure_of(delta, V, sig) and W <= dep_closure_of(delta, U, sig):
                ok = ok and W <= dep_closure_of(delta, V, sig)
        if ok:
            out.append(frozenset(delta))
    return set(out)


def sim(a, b, V):
    return {f for f in a if lfd.free_vars(f) <= V} == {f for f in b if lfd.free_vars(f) <= V}


def brute_is_type_model(deltas, sig):
    deltas = list(deltas)
    for a in deltas:
        for b in deltas:
            if not sim(a, b, frozenset()):
                return False
    for a in deltas:
        for f in a:
            if isinstance(f, lfd.E):
                V = frozenset(dep_closure_of(a, f.vars, sig))
                if not any(sim(a, b, V) and f.body in b for b in deltas):
                    return False
    return True


def as_sets(types):
    return {frozenset(t.formulas()) for t in types}


# closure operators and types


def test_closure_operator_counts():
    assert [len(closure_operators(k)) for k in (1, 2, 3)] == [2, 7, 61]


def test_closure_operator_cap():
    with pytest.raises(SizeCapError):
        closure_operators(5)


def test_atom_has_four_types():
    psi = parse_lfd("P(x)")
    assert len(enumerate_types(psi, S1)) == 4
    assert len(brute_types(psi, S1)) == 4


@pytest.mark.parametrize("text,sig", [
    ("E[] P(x) & ~D[] x", S1),
    ("E[x] (P(y) & ~D[x] y)", S2),
    ("E[] Q(x,y) & ~E[y] P(x)", S2),
    ("D[x] y & E[y] ~P(x)", S2),
])
def test_enumeration_matches_filter(text, sig):
    psi = parse_lfd(text)
    assert as_sets(enumerate_types(psi, sig)) == brute_types(psi, sig)


@settings(max_examples=40, deadline=None)
@given(st.randoms(use_true_random=False))
def test_enumeration_matches_filter_random(rng):
    sig = S1 if rng.random() < 0.5 else S2
    psi = random_lfd(rng, sig, size=3, e_depth=1)
    positives = sum(1 for f in lfd.closure(psi, sig) if not isinstance(f, lfd.Not))
    assume(positives <= 16)
    assert as_sets(enumerate_types(psi, sig)) == brute_types(psi, sig)


def test_every_enumerated_type_passes_the_predicates():
    psi = parse_lfd("E[x] (Q(x,y) & ~D[x] y)")
    cl = closure_table(psi, S2)
    assert all(is_type(t.bits, cl) for t in enumerate_types(psi, S2))


def test_existential_consistency():
    psi = parse_lfd("E[] P(x)")
    for t in enumerate_types(psi, S1):
        assert not (parse_lfd("P(x)") in t and parse_lfd("E[] P(x)") not in t)


# satisfiability


@pytest.mark.parametrize("text", ["E[] P(x) & ~E[] P(x)", "D[] x & E[] P(x) & E[] ~P(x)"])
def test_unsat_examples(text):
    psi = parse_lfd(text)
    assert not sat_lfd(psi, S1).sat
    assert brute_sat_lfd(psi, S1, max_domain=3, max_team=4) is None


def test_certificate_is_a_type_model_for_psi():
    psi = parse_lfd("E[] P(x) & E[] ~P(x) & ~D[] x")
    r = sat_lfd(psi, S1)
    assert r.sat
    v = is_type_model(r.model)
    assert v.ok and v.for_psi
    assert brute_is_type_model(as_sets(r.model), S1)


@settings(max_examples=150, deadline=None)
@given(st.randoms(use_true_random=False))
def test_sat_agrees_with_bounded_search(rng):
    sig = S1 if rng.random() < 0.4 else S2
    psi = random_lfd(rng, sig, size=rng.randint(1, 5), e_depth=2)
    r = sat_lfd(psi, sig)
    hit = brute_sat_lfd(psi, sig, max_domain=2, max_team=3)
    if hit is not None:
        assert r.sat
    if r.sat:
        assert brute_is_type_model(as_sets(r.model), sig)
        assert any(psi in t for t in r.model)


def test_dropping_a_witness_is_reported():
    psi = parse_lfd("E[] P(x) & E[] ~P(x)")
    r = sat_lfd(psi, S1)
    keep = [t for t in r.model if parse_lfd("P(x)") not in t]
    v = is_type_model(keep)
    assert not v.ok and v.clause == "witness"
    assert not brute_is_type_model(as_sets(keep), S1)


def test_mixed_sentences_break_the_universal_condition():
    psi = parse_lfd("E[] P(x)")
    types = enumerate_types(psi, S1)
    yes = next(t for t in types if psi in t)
    no = next(t for t in types if psi not in t)
    v = is_type_model([yes, no])
    assert not v.ok and v.clause == "universal"


def test_empty_set_is_not_for_psi():
    v = is_type_model([])
    assert v.ok and not v.for_psi


# unravelling


def certificate(text, sig):
    with config.caps(closure=256):
        r = sat_lfd(parse_lfd(text), sig)
    assert r.sat
    return r.model


@pytest.mark.parametrize("text,sig", [
    ("E[] P(x) & E[] ~P(x)", S1),
    ("E[x] (P(y) & ~D[x] y) & E[x] ~P(y)", S2),
    ("D[x] y & E[] (Q(x,y) & E[y] ~Q(x,y))", S2),
    ("~D[] x & E[] E[x] (P(y) & ~Q(x,y))", S2),
])
def test_unravelling_realises_its_types(text, sig):
    unr = unravel(certificate(text, sig))
    rep = truth_report(unr)
    assert rep["budget_failures"] == []
    assert rep["dep_failures"] == []
    assert rep["closure_failures"] == []
    cl = unr.closure
    ev = LfdEvaluator(unr.model)
    for s in unr.model.team:
        if unr.height[s] >= 1:
            for (vm, u), i in cl.dep.items():
                assert ev.holds(s, cl.formulas[i]) == unr.types[s].has(i)


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_unravelling_random(rng):
    sig = S1 if rng.random() < 0.3 else S2
    psi = random_lfd(rng, sig, size=rng.randint(1, 6), e_depth=3)
    r = sat_lfd(psi, sig)
    assume(r.sat)
    rep = truth_report(unravel(r.model))
    assert not rep["budget_failures"] and not rep["dep_failures"] and not rep["closure_failures"]


def test_guaranteed_formulas_grow_with_depth():
    tm = certificate("E[x] (P(y) & ~D[x] y) & E[x] ~P(y)", S2)
    root = [t for t in tm if t.has(tm.closure.psi_index)][:1]

    def covered(d):
        unr = unravel(tm, d, roots=root)
        s = unr.roots[0]
        return {i for i in range(unr.closure.n) if unr.guaranteed(i, s)}

    assert covered(0) <= covered(1) <= covered(2)


def test_roots_must_agree_on_constant_variables():
    psi = parse_lfd("D[] x & P(x)")
    types = enumerate_types(parse_lfd("P(x)"), S1)
    fixed = [t for t in types if lfd.Dep(frozenset(), "x") in t]
    assert len(fixed) == 2
    tm = TypeModel(tuple(fixed), fixed[0].closure)
    assert is_type_model(tm).ok
    with pytest.raises(PreconditionError):
        unravel(tm)


def test_literal_lemma_counterexample_is_outside_the_budget():
    tm = certificate("~E[] ~(E[x] P(y) & E[x] ~P(y)) & ~E[] ~E[y] ~D[] x", S2)
    root = [t for t in tm if t.has(tm.closure.psi_index)][:1]
    unr = unravel(tm, 3, roots=root)
    assert literal_truth_lemma(unr)
    assert not unr.guaranteed(tm.closure.psi_index, unr.roots[0])
    assert truth_report(unr)["budget_failures"] == []


def test_unravel_node_cap():
    tm = certificate("E[x] (P(y) & ~D[x] y) & E[x] ~P(y)", S2)
    with config.caps(nodes=2):
        with pytest.raises(SizeCapError):
            unravel(tm, 3)


# from models of setup


@settings(max_examples=100, deadline=None)
@given(st.randoms(use_true_random=False))
def test_type_of_expansion_is_the_realised_type(rng):
    m = random_dependence_model(rng, S2)
    psi = random_lfd(rng, S2, size=4)
    hat = expand_hat(m, psi)
    ev = LfdEvaluator(m)
    for s in m.team:
        t = type_of(hat, s, psi, S2)
        assert set(t.formulas()) == {f for f in t.closure.formulas if ev.holds(s, f)}


@settings(max_examples=100, deadline=None)
@given(st.randoms(use_true_random=False))
def test_build_type_model_on_expansion(rng):
    m = random_dependence_model(rng, S2)
    psi = random_lfd(rng, S2, size=4)
    tm = build_type_model(expand_hat(m, psi), psi, S2)
    assert is_type_model(tm).ok
    ev = LfdEvaluator(m)
    realised = {frozenset(f for f in tm.closure.formulas if ev.holds(s, f)) for s in m.team}
    assert as_sets(tm) == realised


def test_build_type_model_needs_A_tuples():
    psi = parse_lfd("P(x)")
    hat = StandardModel(("a",), {"A": [], "P": []}, {**S1.hat_relations()})
    with pytest.raises(PreconditionError):
        build_type_model(hat, psi, S1, check_setup=False)


@settings(max_examples=40, deadline=None)
@given(st.randoms(use_true_random=False))
def test_H_root_has_the_type_of_s(rng):
    m = random_dependence_model(rng, S2, max_domain=2, max_team=3)
    psi = random_lfd(rng, S2, size=4, e_depth=2)
    hat = expand_hat(m, psi)
    s = m.team[0]
    model, root = H(hat, s, psi, S2)
    want = type_of(hat, s, psi, S2)
    ev = LfdEvaluator(model)
    sd = dict(zip(S2.lfd_vars, s))
    for i, f in enumerate(want.closure.formulas):
        if lfd.e_depth(f) == 0:
            assert ev.holds(root, f) == eval_fo(hat, sd, tr_bullet(f, S2))
