import pytest
from hypothesis import given, settings, strategies as st

from lfdgf.errors import PreconditionError, SignatureError, SizeCapError
from lfdgf.mcheck import dep_closure, eval_fo, eval_lfd
from lfdgf.models import (DependenceModel, StandardModel, distinguish, drop_unnamed_G, expand_hat,
                          from_standard_T, full_F, is_distinguished, is_guarded_assignment,
                          lift_distinguished, to_standard_Tinv)
from lfdgf.oracle import random_dependence_model, random_gf, random_lfd
from lfdgf.syntax import Signature, lfd, parse_lfd
from lfdgf.translate import setup

SIG = Signature({"P": 1, "Q": 2}, ("x", "y"))


def dm(domain, rels, team, vars_=("x", "y")):
    arities = {n: SIG.relations[n] for n in rels}
    return DependenceModel(StandardModel.build(domain, rels, arities), vars_, team)


def test_T_reads_team_from_A():
    hat = StandardModel.build(["a", "b"], {"A": [("a", "b")]})
    m = from_standard_T(hat, ("x", "y"))
    assert m.team == (("a", "b"),)
    assert "A" not in m.base.arities


def test_T_on_empty_A_gives_empty_team():
    hat = StandardModel(("a",), {"A": []}, {"A": 2})
    m = from_standard_T(hat, ("x", "y"))
    assert m.team == ()
    with pytest.raises(PreconditionError):
        m.require_nonempty()


def test_Tinv_writes_A():
    m = dm(["a", "b"], {}, [("a", "b")])
    assert to_standard_Tinv(m).relations["A"] == {("a", "b")}
    assert to_standard_Tinv(dm(["a"], {}, [])).relations["A"] == frozenset()


@settings(max_examples=100, deadline=None)
@given(st.randoms(use_true_random=False))
def test_T_and_Tinv_are_inverse(rng):
    m = random_dependence_model(rng, SIG)
    assert from_standard_T(to_standard_Tinv(m), SIG) == m
    hat = to_standard_Tinv(m)
    assert to_standard_Tinv(from_standard_T(hat, SIG)) == hat


def test_full_F_team_size_and_G_inverse():
    M = StandardModel.build(["a", "b"], {"P": [("a",)], "Q": [("a", "b")]})
    full = full_F(M, ("x", "y"))
    assert len(full.team) == 4
    assert drop_unnamed_G(full) == M


def test_full_F_cap():
    M = StandardModel.build(["a", "b", "c"], {"P": [("a",)]})
    with pytest.raises(SizeCapError):
        full_F(M, ("x", "y"), cap=8)


def test_dependence_atoms_fail_on_full_models():
    M = StandardModel.build(["a", "b"], {"P": [("a",)]})
    full = full_F(M, ("x", "y"))
    for s in full.team:
        assert not eval_lfd(full, s, parse_lfd("D[x] y"))
        assert not eval_lfd(full, s, parse_lfd("D[] x"))
        assert eval_lfd(full, s, parse_lfd("D[x y] x"))


def test_G_keeps_witnessed_facts():
    M = dm(["a", "b"], {"Q": [("a", "b")]}, [("a", "b")])
    assert drop_unnamed_G(M).relations["Q"] == {("a", "b")}


def test_G_drops_unwitnessed_facts():
    M = dm(["a", "b"], {"Q": [("a", "b")]}, [("a", "a"), ("b", "b")])
    assert drop_unnamed_G(M).relations["Q"] == frozenset()


def test_distinguish_tags_values():
    m = dm(["a"], {"P": [("a",)]}, [("a", "a")])
    md, Z = distinguish(m)
    assert Z == [(("a", "a"), ("x:a", "y:a"))]
    assert md.base.relations["P"] == {("x:a",), ("y:a",)}
    assert is_distinguished(md)


def test_distinguish_single_var_fact():
    m = dm(["a"], {"P": [("a",)]}, [("a",)], vars_=("x",))
    md, _ = distinguish(m)
    assert md.base.relations["P"] == {("x:a",)}


def test_is_distinguished_examples():
    assert not is_distinguished(dm(["a"], {}, [("a", "a")]))
    assert is_distinguished(dm(["a", "b"], {}, [("a", "b")]))


@settings(max_examples=100, deadline=None)
@given(st.randoms(use_true_random=False))
def test_distinguish_output_is_distinguished(rng):
    md, _ = distinguish(random_dependence_model(rng, SIG))
    assert is_distinguished(md)


def test_lift_domain_size_and_distinctness_clause():
    M = StandardModel.build(["a", "b"], {"Q": [("a", "a")]})
    model, rho, t = lift_distinguished(M, {"u": "a"}, ("x", "y"))
    assert len(model.base.domain) == 2 * 2
    Q = model.base.relations["Q"]
    assert ("x:a", "x:a") in Q and ("x:a", "y:a") in Q
    assert is_distinguished(model)
    assert rho == {"u": "x"} and t[0] == "x:a"


def test_lift_requires_guarded_assignment_and_enough_vars():
    M = StandardModel.build(["a", "b"], {"Q": [("a", "a")]})
    with pytest.raises(PreconditionError):
        lift_distinguished(M, {"u": "a", "w": "b"}, ("x", "y"))
    with pytest.raises(PreconditionError):
        lift_distinguished(M, {"u": "a"}, ("x",))
    assert is_guarded_assignment(M, {"u": "a", "w": "a"})


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_lift_preserves_gf_truth(rng):
    # the lifted model is meant to be GF-equivalent at the chosen assignment;
    # sampled GF formulas over one free variable must agree
    M = StandardModel.build(["a", "b"], {"P": [("a",)], "Q": [p for p in [("a", "b"), ("b", "b")] if rng.random() < 0.7]},
                            {"P": 1, "Q": 2})
    model, rho, t = lift_distinguished(M, {"u": "a"}, ("x", "y"))
    G = drop_unnamed_G(model)
    for _ in range(5):
        phi = random_gf(rng, {"P": 1, "Q": 2}, size=4, free=("u",), nvars=2)
        here = eval_fo(M, {"u": "a"}, phi)
        there = eval_fo(G, {"u": t[model.vars.index(rho["u"])]}, phi)
        assert here == there


def test_expand_hat_projection_relation():
    m = dm(["a"], {}, [("a",)], vars_=("x",))
    hat = expand_hat(m)
    assert hat.relations["R_{x}_{x}"] == {("a",)}


def test_expand_hat_drops_failing_dependence():
    m = dm(["a", "b"], {}, [("a",), ("b",)], vars_=("x",))
    assert expand_hat(m).relations["R_{}_{x}"] == frozenset()


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_expand_hat_satisfies_setup(rng):
    m = random_dependence_model(rng, SIG)
    psi = random_lfd(rng, SIG, size=5)
    assert eval_fo(expand_hat(m, psi), {}, setup(psi, SIG))


def test_models_reject_bad_tuples():
    with pytest.raises(SignatureError):
        StandardModel(("a",), {"P": [("b",)]}, {"P": 1})
    with pytest.raises(SignatureError):
        DependenceModel(StandardModel(("a",), {}, {}), ("x", "y"), [("a",)])
