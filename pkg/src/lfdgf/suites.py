"""Property suites that exercise the translations end to end on seeded corpora.

Each suite returns a :class:`SuiteResult`; ``run_suite(name, seed, n)``
dispatches by name. The same suites back the acceptance tests and the
``roundtrip`` CLI command.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from itertools import combinations, product

from . import config
from .errors import SizeCapError
from .mcheck import LfdEvaluator, check_dep_bisim, eval_fo, eval_lfd
from .models import (DependenceModel, StandardModel, distinguish, drop_unnamed_G, expand_hat,
                     is_distinguished, to_standard_Tinv)
from .oracle import (brute_sat_gf, brute_sat_lfd, random_dependence_model, random_distinguished,
                     random_gf, random_lfd)
from .syntax import fo, lfd, parse_fo
from .syntax.signature import Signature
from .translate import setup, setup_parts, sigma, tau, tau_all, team_atom, tr, tr_bullet
from .typemodel import (build_type_model, closure_table, is_type_model, literal_truth_lemma,
                        sat_lfd, truth_report, unravel)

# Fitted once on the calibration corpus of ``fit_sigma_constant(seed=0)``
# (every one-node formula for k = 1, 2, 3 plus 150 random ones), rounded up.
SIGMA_SIZE_CONSTANT = 30

VARS = ("x", "y", "z")


def signature(k: int) -> Signature:
    return Signature({"P": 1} if k == 1 else {"P": 1, "Q": 2}, VARS[:k])


@dataclass
class SuiteResult:
    name: str
    criterion: str
    instances: int = 0
    failures: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    best_effort: bool = False
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, detail: str):
        self.failures.append(detail)

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        extra = ", ".join(f"{k}={v}" for k, v in sorted(self.stats.items()))
        tail = f" [{extra}]" if extra else ""
        return f"{verdict} {self.name}: {self.criterion} ({self.instances} instances, {self.seconds:.1f}s){tail}"

    def to_json(self) -> dict:
        return {"suite": self.name, "passed": self.passed, "instances": self.instances,
                "failures": self.failures[:20], "stats": self.stats, "best_effort": self.best_effort,
                "seconds": round(self.seconds, 2)}


def _text(f, sig=None) -> str:
    from .syntax import fo_to_text, lfd_to_text
    return lfd_to_text(f, sig) if isinstance(f, lfd.Formula) else fo_to_text(f)


# exhaustive tiny cases


def tiny_lfd(sig: Signature) -> list:
    """Literals over the signature, and one E over each of them for every V."""
    leaves = [lfd.Atom(name, args) for name, a in sorted(sig.relations.items())
              for args in product(sig.lfd_vars, repeat=a)]
    leaves += lfd.dep_atoms(sig)
    literals = leaves + [lfd.Not(f) for f in leaves]
    out = list(literals)
    for V in sig.subsets():
        out += [lfd.E(V, f) for f in literals]
    return out


def tiny_models(sig: Signature) -> list:
    """Every dependence model over {a, b} with unary relations only."""
    domain = ("a", "b")
    unary = [n for n, a in sig.relations.items() if a == 1]
    assignments = list(product(domain, repeat=sig.k))
    out = []
    for size in range(1, len(assignments) + 1):
        for team in combinations(assignments, size):
            for ext in product([(), ("a",), ("b",), ("a", "b")], repeat=len(unary)):
                rels = {n: [(m,) for m in e] for n, e in zip(unary, ext)}
                rels.update({n: [] for n, a in sig.relations.items() if a != 1})
                out.append(DependenceModel(StandardModel(domain, rels, dict(sig.relations)), sig.lfd_vars, team))
    return out


# criterion 1


def suite_tr(seed: int = 0, n: int = 500) -> SuiteResult:
    res = SuiteResult("tr", "LFD truth equals truth of tr(psi) & A(v) on T^-1 of the model")
    rng = random.Random(seed)

    def check(model, psi, sig):
        phi = fo.And(tr(psi, sig), team_atom(sig))
        hat = to_standard_Tinv(model)
        ev = LfdEvaluator(model)
        for s in model.team:
            want = ev.holds(s, psi)
            got = eval_fo(hat, dict(zip(sig.lfd_vars, s)), phi)
            if want != got:
                res.fail(f"{_text(psi, sig)} at {s}: lfd={want} fo={got}")
        res.instances += 1

    sig1 = Signature({"P": 1}, ("x",))
    for model in tiny_models(sig1):
        for psi in tiny_lfd(sig1):
            check(model, psi, sig1)
    for _ in range(n):
        k = rng.randint(1, 3)
        sig = signature(k)
        model = random_dependence_model(rng, sig)
        psi = random_lfd(rng, sig, size=rng.randint(0, 7), e_depth=3)
        check(model, psi, sig)
    return res


# criterion 2


def suite_tau(seed: int = 0, n: int = 500) -> SuiteResult:
    res = SuiteResult("tau", "tau_rho(phi) at s equals phi at s.rho in G of a distinguished model")
    rng = random.Random(seed)
    for _ in range(n):
        k = rng.randint(2, 3)
        sig = signature(k)
        model = random_distinguished(rng, sig)
        free = tuple(sorted(rng.sample(["x1", "x2"], rng.randint(0, 2))))
        phi = random_gf(rng, sig.relations, size=rng.randint(1, 5), e_depth=2, free=free)
        G = drop_unnamed_G(model)
        xs = sorted(fo.free_vars(phi))
        for choice in product(sig.lfd_vars, repeat=len(xs)):
            rho = dict(zip(xs, choice))
            t = tau(phi, rho, sig)
            ev = LfdEvaluator(model)
            for s in model.team:
                sd = dict(zip(sig.lfd_vars, s))
                want = eval_fo(G, {x: sd[rho[x]] for x in xs}, phi)
                got = ev.holds(s, t)
                if want != got:
                    res.fail(f"{_text(phi)} rho={rho} at {s}: gf={want} lfd={got}")
        res.instances += 1
    return res


# criterion 3


def suite_equisat_gf(seed: int = 0, n: int = 500, max_domain: int = 3) -> SuiteResult:
    res = SuiteResult("equisat-gf", "a GF formula has a model iff some tau translation is LFD-satisfiable")
    rng = random.Random(seed)
    counts = {"sat": 0, "unsat": 0, "capped": 0}
    for _ in range(n):
        sig = signature(2)
        free = ("x1",) if rng.random() < 0.2 else ()
        phi = random_gf(rng, sig.relations, size=rng.randint(1, 4), e_depth=2, free=free)
        try:
            with config.caps(closure=2048, types=400_000):
                verdicts = [sat_lfd(t, sig).sat for _, t in tau_all(phi, sig)]
        except SizeCapError:
            counts["capped"] += 1
            continue
        found = brute_sat_gf(phi, max_domain, arities=dict(sig.relations))
        res.instances += 1
        if found is not None and not any(verdicts):
            res.fail(f"{_text(phi)}: finite model found but every translation is UNSAT")
        if any(verdicts) and found is None:
            counts.setdefault("sat_beyond_bound", 0)
            counts["sat_beyond_bound"] += 1
        counts["sat" if any(verdicts) else "unsat"] += 1
    res.stats = counts
    return res


# criterion 4

# Formulas whose every model needs witnesses below any truncation depth,
# plus a few UNSAT ones; they keep the sigma and unravelling suites honest.
CURATED_LFD = [
    (2, "~E[] ~(E[x] P(y) & E[x] ~P(y))"),
    (2, "~E[] ~(E[x] P(y) & E[x] ~P(y)) & ~E[] ~E[y] ~D[] x"),
    (2, "~E[] ~E[x] P(y) & E[] ~P(y)"),
    (2, "D[] x & E[] P(x) & E[] ~P(x)"),
    (2, "E[] P(x) & ~E[] P(x)"),
    (2, "D[x] y & E[x] (P(y) & ~E[x] P(y))"),
    (1, "E[] P(x) & E[] ~P(x)"),
    (3, "~E[] ~(E[x,y] ~D[x,y] z & E[z] ~D[z] x)"),
]


def curated_lfd():
    from .syntax import parse_lfd
    out = []
    for k, text in CURATED_LFD:
        sig = signature(k)
        out.append((parse_lfd(text, sig), sig))
    return out


def concrete_model(psi, sig, cert, extra_depth: int = 2):
    """A finite dependence model and assignment satisfying psi.

    Tries unravellings of the certificate first, then brute-force search.
    """
    base = lfd.e_depth(psi) + 1
    start = [t for t in cert if t.has(cert.closure.psi_index)][:1]
    for d in range(base, base + extra_depth + 1):
        try:
            unr = unravel(cert, d, roots=start)
        except SizeCapError:
            break
        root = unr.roots[0]
        if eval_lfd(unr.model, root, psi):
            return unr.model, root, "unravel"
    hit = brute_sat_lfd(psi, sig, max_domain=3, max_team=4)
    if hit is not None:
        return hit.model, hit.assignment, "search"
    return None


def suite_sigma(seed: int = 0, n: int = 500, max_domain: int = 2) -> SuiteResult:
    res = SuiteResult("sigma", "SAT psi gives a model of sigma(psi); UNSAT psi leaves sigma(psi) without small models")
    rng = random.Random(seed)
    counts = {"sat": 0, "unsat": 0, "via_unravel": 0, "via_search": 0}
    corpus = curated_lfd()
    for _ in range(n):
        sig = signature(rng.choice([1, 2, 2]))
        corpus.append((random_lfd(rng, sig, size=rng.randint(0, 5), e_depth=2), sig))
    for psi, sig in corpus:
        if sig.k > 2:
            continue
        r = sat_lfd(psi, sig)
        res.instances += 1
        s_formula = sigma(psi, sig)
        if r.sat:
            counts["sat"] += 1
            got = concrete_model(psi, sig, r.model)
            if got is None:
                res.fail(f"{_text(psi, sig)}: SAT but no concrete model found")
                continue
            model, s, how = got
            counts["via_" + how] += 1
            if not eval_fo(expand_hat(model, psi), dict(zip(sig.lfd_vars, s)), s_formula):
                res.fail(f"{_text(psi, sig)}: expanded model fails sigma")
        else:
            counts["unsat"] += 1
            if brute_sat_gf(s_formula, max_domain, arities=sig.hat_relations()) is not None:
                res.fail(f"{_text(psi, sig)}: UNSAT but sigma has a model")
    res.stats = counts
    return res


# criterion 5


def random_setup_model(rng, psi, sig, max_domain=2):
    """A standard model of setup(psi) & A(v), steered by a random guarded sentence."""
    extra = random_gf(rng, sig.relations, size=rng.randint(1, 3), e_depth=1)
    goal = fo.conjoin([setup(psi, sig), team_atom(sig), extra])
    hit = brute_sat_gf(goal, max_domain, arities=sig.hat_relations())
    return None if hit is None else hit.model


def suite_setup(seed: int = 0, n: int = 500) -> SuiteResult:
    res = SuiteResult("setup", "types of a model of setup(psi) form a type model")
    rng = random.Random(seed)
    counts = {"expand_hat": 0, "searched": 0, "no_model": 0}
    for i in range(n):
        k = rng.choice([1, 2, 2])
        sig = signature(k)
        psi = random_lfd(rng, sig, size=rng.randint(0, 5), e_depth=2)
        if i % 2 == 0:
            model = random_dependence_model(rng, sig)
            M_hat = expand_hat(model, psi)
            tm = build_type_model(M_hat, psi, sig)
            cl = closure_table(psi, sig)
            ev = LfdEvaluator(model)
            realised = set()
            for s in model.team:
                realised.add(sum(1 << j for j, f in enumerate(cl.formulas) if ev.holds(s, f)))
            if {t.bits for t in tm} != realised:
                res.fail(f"{_text(psi, sig)}: types of the expansion differ from the realised types")
            counts["expand_hat"] += 1
        else:
            M_hat = random_setup_model(rng, psi, sig)
            if M_hat is None:
                counts["no_model"] += 1
                continue
            tm = build_type_model(M_hat, psi, sig)
            counts["searched"] += 1
        v = is_type_model(tm)
        res.instances += 1
        if not v.ok:
            res.fail(f"{_text(psi, sig)}: {v.clause} ({v.detail})")
    res.stats = counts
    return res


# criterion 6


def suite_unravel(seed: int = 0, n: int = 500) -> SuiteResult:
    res = SuiteResult("unravel", "unravelled certificates agree with their types within the truth budget")
    rng = random.Random(seed)
    counts = {"certificates": 0, "outside_budget": 0, "literal_lemma_misses": 0, "root_guaranteed": 0}

    def corpus():
        yield from curated_lfd()
        while True:
            sig = signature(rng.choice([1, 2, 2, 3]))
            yield random_lfd(rng, sig, size=rng.randint(0, 6), e_depth=3), sig

    target = n + len(CURATED_LFD)
    for psi, sig in corpus():
        if res.instances >= target:
            break
        with config.caps(closure=256):
            r = sat_lfd(psi, sig)
        if not r.sat:
            continue
        res.instances += 1
        counts["certificates"] += 1
        unr = unravel(r.model)
        rep = truth_report(unr)
        for key in ("budget_failures", "dep_failures", "closure_failures"):
            if rep[key]:
                res.fail(f"{_text(psi, sig)}: {key} {rep[key][:2]}")
        counts["outside_budget"] += rep["outside_budget"]
        counts["literal_lemma_misses"] += bool(literal_truth_lemma(unr))
        counts["root_guaranteed"] += unr.guaranteed(r.model.closure.psi_index, unr.roots[0])
    res.stats = counts
    return res


# criterion 7


def suite_distinguish(seed: int = 0, n: int = 500, samples: int = 3) -> SuiteResult:
    res = SuiteResult("distinguish", "distinguished copies are dependence-bisimilar and agree on sampled formulas")
    rng = random.Random(seed)
    for _ in range(n):
        sig = signature(rng.randint(1, 3))
        model = random_dependence_model(rng, sig)
        d, Z = distinguish(model)
        res.instances += 1
        if not is_distinguished(d):
            res.fail(f"{model}: output is not distinguished")
        v = check_dep_bisim(model, d, Z)
        if not v.ok:
            res.fail(f"{model}: {v.clause} {v.detail}")
        e1, e2 = LfdEvaluator(model), LfdEvaluator(d)
        for _ in range(samples):
            psi = random_lfd(rng, sig, size=rng.randint(0, 6), e_depth=3)
            for s, sd in Z:
                if e1.holds(s, psi) != e2.holds(sd, psi):
                    res.fail(f"{_text(psi, sig)} differs at {s}")
    return res


# criterion 8


def suite_roundtrip(seed: int = 0, n: int = 500) -> SuiteResult:
    res = SuiteResult("roundtrip", "tau_id(tr_bullet(xi)) is equivalent to xi on distinguished models")
    rng = random.Random(seed)

    def check(model, xi, sig):
        back = tau(tr_bullet(xi, sig), {v: v for v in lfd.free_vars(xi)}, sig)
        ev = LfdEvaluator(model)
        for s in model.team:
            if ev.holds(s, xi) != ev.holds(s, back):
                res.fail(f"{_text(xi, sig)} at {s}")
        res.instances += 1

    sig1 = Signature({"P": 1}, ("x",))
    for model in tiny_models(sig1):
        d = distinguish(model)[0]
        for xi in tiny_lfd(sig1):
            check(d, xi, sig1)
    for _ in range(n):
        sig = signature(rng.randint(1, 3))
        check(random_distinguished(rng, sig), random_lfd(rng, sig, size=rng.randint(0, 7), e_depth=3), sig)
    return res


# criterion 9


def non_decomposable_count(psi, sig) -> int:
    """Counted from first principles: subformulas and single negations, plus all D atoms."""
    members = set(lfd.dep_atoms(sig))
    for f in lfd.subformulas(psi):
        members.add(f)
        members.add(f.sub if isinstance(f, lfd.Not) else lfd.Not(f))
    return sum(1 for f in members if not isinstance(f, (lfd.And, lfd.Not)))


def sigma_ratio(psi, sig) -> float:
    return fo.dag_size(sigma(psi, sig)) / (lfd.size(psi) * 2 ** (3 * sig.k))


def fit_sigma_constant(seed: int = 0, n: int = 150) -> int:
    """Recompute the size constant from the calibration corpus."""
    rng = random.Random(seed)
    worst = 0.0
    with config.caps(closure=4096):
        for k in (1, 2, 3):
            sig = signature(k)
            for leaf in [f for f in tiny_lfd(sig) if not isinstance(f, (lfd.Not, lfd.E))]:
                worst = max(worst, sigma_ratio(leaf, sig))
        for _ in range(n):
            sig = signature(rng.randint(1, 3))
            worst = max(worst, sigma_ratio(random_lfd(rng, sig, size=rng.randint(0, 8), e_depth=3), sig))
    return math.ceil(worst)


def suite_size(seed: int = 0, n: int = 500) -> SuiteResult:
    res = SuiteResult("size", "setup has 2^k + 2^3k + n_xi 2^2k conjuncts and sigma stays within c |psi| 2^3k")
    rng = random.Random(seed)
    worst = 0.0
    with config.caps(closure=4096):
        for _ in range(n):
            k = rng.choice([1, 2, 2, 3])
            sig = signature(k)
            psi = random_lfd(rng, sig, size=rng.randint(0, 8), e_depth=3)
            parts = setup_parts(psi, sig)
            n_xi = non_decomposable_count(psi, sig)
            want = (2 ** k, 2 ** (3 * k), n_xi * 2 ** (2 * k))
            got = (len(parts["projection"]), len(parts["transitivity"]), len(parts["transfer"]))
            res.instances += 1
            if want != got:
                res.fail(f"{_text(psi, sig)}: conjunct counts {got}, expected {want}")
            ratio = sigma_ratio(psi, sig)
            worst = max(worst, ratio)
            if ratio > SIGMA_SIZE_CONSTANT:
                res.fail(f"{_text(psi, sig)}: |sigma| / (|psi| 2^3k) = {ratio:.2f} > {SIGMA_SIZE_CONSTANT}")
    res.stats = {"c": SIGMA_SIZE_CONSTANT, "worst_ratio": round(worst, 2)}
    return res


# criterion 10


CURATED_GF = [
    "exists x . P(x)",
    "exists x . P(x) & exists y . ~P(y)",
    "exists x y . Q(x,y)",
    "exists x y . (Q(x,y) & ~Q(y,x))",
    "exists x . Q(x,x)",
    "exists x y . (Q(x,y) & P(x) & ~P(y))",
    "forall x y . (Q(x,y) -> Q(y,x)) & exists x y . (Q(x,y) & ~P(x))",
    "exists x y . Q(x,y) & forall x y . (Q(x,y) -> exists z . Q(y,z))",
    "exists x y . Q(x,y) & forall x y . (Q(x,y) -> exists z . (Q(y,z) & ~Q(z,y)))",
    "exists x . P(x) & forall x . (P(x) -> exists y . (Q(x,y) & ~P(y)))",
    "exists x . P(x) & forall x . (P(x) -> exists y . (Q(x,y) & P(y)))",
    "forall x y . (Q(x,y) -> ~Q(y,x)) & exists x y . Q(x,y)",
    "exists x y . (Q(x,y) & exists z . (Q(y,z) & exists w . Q(z,w)))",
    "forall x . (P(x) -> exists y . Q(x,y)) & exists x . P(x)",
    "exists x . (P(x) & ~exists y . (Q(x,y) & P(y)))",
    "forall x y . (Q(x,y) -> (P(x) | P(y))) & exists x y . Q(x,y)",
    "exists x y . (Q(x,y) & P(x)) & exists x y . (Q(x,y) & ~P(y))",
    "forall x . (P(x) -> exists y . (Q(y,x) & ~P(y))) & exists x . P(x)",
    "exists x y . (Q(x,y) & ~exists z . Q(y,z)) & exists x . P(x)",
    "exists x y . (Q(x,y) & Q(y,x) & P(x) & ~P(y))",
]


def suite_fmp(seed: int = 0, n: int = 20, max_domain: int = 4) -> SuiteResult:
    res = SuiteResult("fmp", "curated satisfiable GF sentences have small finite models (best effort)",
                      best_effort=True)
    found, exhausted = 0, []
    for text in CURATED_GF[:n]:
        phi = parse_fo(text)
        res.instances += 1
        hit = brute_sat_gf(phi, max_domain)
        if hit is None:
            exhausted.append(text)
        else:
            found += 1
    res.stats = {"found": found, "bound_exhausted": len(exhausted), "max_domain": max_domain}
    if exhausted:
        res.stats["exhausted"] = exhausted
    return res


SUITES = {
    "tr": suite_tr,
    "tau": suite_tau,
    "equisat-gf": suite_equisat_gf,
    "sigma": suite_sigma,
    "setup": suite_setup,
    "unravel": suite_unravel,
    "distinguish": suite_distinguish,
    "roundtrip": suite_roundtrip,
    "size": suite_size,
    "fmp": suite_fmp,
}


def run_suite(name: str, seed: int = 0, n: int | None = None) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    fn = SUITES[name]
    start = time.perf_counter()
    res = fn(seed=seed) if n is None else fn(seed=seed, n=n)
    res.seconds = time.perf_counter() - start
    return res
