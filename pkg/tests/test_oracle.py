import random

import pytest
from hypothesis import given, settings, strategies as st

from lfdgf.errors import PreconditionError
from lfdgf.mcheck import eval_fo, eval_lfd
from lfdgf.models import is_distinguished
from lfdgf.oracle import (brute_sat_gf, brute_sat_lfd, element_names, random_corpus, random_gf,
                          random_lfd)
from lfdgf.syntax import Signature, fo, parse_fo, parse_lfd
from lfdgf.translate import sigma

S1 = Signature({"P": 1}, ("x",))
S2 = Signature({"P": 1, "Q": 2}, ("x", "y"))


def test_minimal_model_for_two_witnesses():
    hit = brute_sat_lfd(parse_lfd("E[] P(x) & E[] ~P(x)"), S1)
    m = hit.model
    assert m.base.domain == ("a", "b")
    assert m.base.relations["P"] == {("a",)}
    assert m.team == (("a",), ("b",))


def test_two_variable_model_shape():
    hit = brute_sat_lfd(parse_lfd("E[] P(x) & ~E[] P(y)"), Signature({"P": 1}, ("x", "y")))
    m = hit.model
    assert m.base.domain == ("a", "b")
    assert m.base.relations["P"] == {("a",)}
    assert m.team == (("a", "b"),)


def test_contradiction_has_no_model():
    assert brute_sat_lfd(parse_lfd("P(x) & ~P(x)"), S1) is None


def test_search_results_are_checked():
    psi = parse_lfd("E[x] ~D[x] y & Q(x,y)")
    hit = brute_sat_lfd(psi, S2)
    assert eval_lfd(hit.model, hit.assignment, psi)


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_symmetry_reduction_changes_nothing(rng):
    psi = random_lfd(rng, S2, size=4)
    a = brute_sat_lfd(psi, S2, max_domain=2, max_team=3, symmetry=True)
    b = brute_sat_lfd(psi, S2, max_domain=2, max_team=3, symmetry=False)
    assert (a is None) == (b is None)
    if a is not None:
        assert len(a.model.team) == len(b.model.team)


def test_bounds_must_be_positive():
    with pytest.raises(PreconditionError):
        brute_sat_lfd(parse_lfd("P(x)"), S1, max_domain=0)
    with pytest.raises(PreconditionError):
        brute_sat_gf(parse_fo("exists x . P(x)"), max_domain=0)


def test_gf_examples():
    hit = brute_sat_gf(parse_fo("exists x . P(x)"))
    assert hit.model.domain == ("a",) and hit.model.relations["P"] == {("a",)}
    assert brute_sat_gf(parse_fo("exists x . P(x) & ~exists y . P(y)")) is None


def test_gf_free_variables_are_witnessed():
    phi = parse_fo("Q(x,y) & ~Q(y,x)")
    hit = brute_sat_gf(phi)
    assert eval_fo(hit.model, hit.assignment, phi)
    assert len(hit.model.domain) == 2


def test_sigma_of_small_formula_has_a_model():
    psi = parse_lfd("E[] P(x) & E[] ~P(x)")
    phi = sigma(psi, S1)
    hit = brute_sat_gf(phi, 2, arities=S1.hat_relations())
    assert hit is not None and eval_fo(hit.model, hit.assignment, phi)


def naive_gf_sat(phi, n, rels):
    """Enumerate every structure of size n outright."""
    from itertools import product
    from lfdgf.models import StandardModel
    dom = element_names(n)
    slots = [(name, t) for name, a in sorted(rels.items()) for t in product(dom, repeat=a)]
    xs = sorted(fo.free_vars(phi))
    for bits in range(1 << len(slots)):
        facts = {name: [] for name in rels}
        for i, (name, t) in enumerate(slots):
            if bits >> i & 1:
                facts[name].append(t)
        M = StandardModel(tuple(dom), facts, rels)
        for vals in product(dom, repeat=len(xs)):
            if eval_fo(M, dict(zip(xs, vals)), phi):
                return True
    return False


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_grounding_agrees_with_enumeration(rng):
    rels = {"P": 1, "Q": 2}
    phi = random_gf(rng, rels, size=4)
    got = brute_sat_gf(phi, 2, arities=rels, min_domain=2) is not None
    assert got == naive_gf_sat(phi, 2, rels)


def test_corpus_is_reproducible():
    assert random_corpus(7, "lfd", 10) == random_corpus(7, "lfd", 10)
    assert random_corpus(7, "gf", 10) == random_corpus(7, "gf", 10)
    assert random_corpus(7, "lfd", 10) != random_corpus(8, "lfd", 10)


def test_corpus_invariants():
    assert all(fo.is_guarded(f).is_gf for f in random_corpus(1, "gf", 50))
    assert all(is_distinguished(m) for m in random_corpus(1, "distinguished", 30))
    with pytest.raises(ValueError):
        random_corpus(1, "nope", 1)
