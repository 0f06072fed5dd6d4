"""Bounded brute-force model search and seeded random corpora.

The searchers share nothing with the model checkers beyond the formula
trees, so their answers can be cross-checked against them. "Nothing found"
only means nothing exists within the bounds.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations, permutations, product

import numpy as np
from pysat.solvers import Solver

from .errors import PreconditionError
from .models import DependenceModel, StandardModel, distinguish
from .syntax import fo, lfd
from .syntax.signature import Signature


def element_names(n: int) -> list[str]:
    return [chr(ord("a") + i) if n <= 26 else f"e{i}" for i in range(n)]


# LFD search


@dataclass(frozen=True)
class LfdWitness:
    model: DependenceModel
    assignment: tuple


def _canonical(team: tuple, domain: list, perms: list) -> bool:
    for perm in perms:
        image = tuple(sorted(tuple(perm[m] for m in s) for s in team))
        if image < team:
            return False
    return True


def _lfd_atoms(psi) -> list:
    return sorted({f for f in lfd.subformulas(psi) if isinstance(f, lfd.Atom)}, key=repr)


class _TeamSearch:
    """Evaluate psi on one team under every interpretation of the relevant facts at once."""

    chunk = 16

    def __init__(self, psi, sig, team):
        self.psi, self.sig, self.team = psi, sig, team
        facts = {}
        self.cells = {}
        for a in _lfd_atoms(psi):
            pos = [sig.index(x) for x in a.args]
            for j, s in enumerate(team):
                fact = (a.pred, tuple(s[p] for p in pos))
                self.cells[(a, j)] = facts.setdefault(fact, len(facts))
        self.facts = list(facts)

    def _eval(self, interp: np.ndarray):
        team, sig = self.team, self.sig
        n = len(team)
        bits = [(interp >> i & 1).astype(bool) for i in range(len(self.facts))]
        memo = {}

        def groups(vs):
            pos = [sig.index(v) for v in vs]
            out = {}
            for j, s in enumerate(team):
                out.setdefault(tuple(s[p] for p in pos), []).append(j)
            return out

        def go(f):
            if f in memo:
                return memo[f]
            if isinstance(f, lfd.Atom):
                out = np.stack([bits[self.cells[(f, j)]] for j in range(n)])
            elif isinstance(f, lfd.Not):
                out = ~go(f.sub)
            elif isinstance(f, lfd.And):
                out = go(f.left) & go(f.right)
            elif isinstance(f, lfd.Dep):
                u = sig.index(f.target)
                row = np.zeros(n, dtype=bool)
                for members in groups(f.vars).values():
                    same = len({team[j][u] for j in members}) == 1
                    row[members] = same
                out = np.repeat(row[:, None], len(interp), axis=1)
            elif isinstance(f, lfd.E):
                body = go(f.body)
                out = np.empty_like(body)
                for members in groups(f.vars).values():
                    out[members] = body[members].any(axis=0)
            else:
                raise TypeError(f"not an LFD formula: {f!r}")
            memo[f] = out
            return out

        return go(self.psi)

    def first(self):
        total = 1 << len(self.facts)
        low = np.arange(min(total, 1 << self.chunk), dtype=np.int64)
        for hi in range(max(1, total >> self.chunk)):
            interp = (hi << self.chunk) | low
            ext = self._eval(interp)
            hits = np.flatnonzero(ext.any(axis=0))
            if len(hits):
                i = int(interp[hits[0]])
                j = int(np.flatnonzero(ext[:, hits[0]])[0])
                return i, j
        return None

    def build(self, i: int, j: int) -> LfdWitness:
        rels = {name: [] for name in self.sig.relations}
        for b, (pred, args) in enumerate(self.facts):
            if i >> b & 1:
                rels[pred].append(args)
        domain = sorted({m for s in self.team for m in s})
        base = StandardModel(tuple(domain), rels, dict(self.sig.relations))
        return LfdWitness(DependenceModel(base, self.sig.lfd_vars, self.team), self.team[j])


def brute_sat_lfd(psi: lfd.Formula, sig: Signature, max_domain: int = 3, max_team: int = 4,
                  symmetry: bool = True) -> LfdWitness | None:
    """First dependence model (by team size, then lexicographically) satisfying psi.

    Teams are drawn over a domain of ``max_domain`` elements; teams equal up
    to renaming domain elements are tried once when ``symmetry`` is on.
    """
    if max_domain < 1 or max_team < 1:
        raise PreconditionError("bounds must be at least 1")
    lfd.check(psi, sig)
    domain = element_names(max_domain)
    perms = [dict(zip(domain, p)) for p in permutations(domain)][1:]
    assignments = list(product(domain, repeat=sig.k))
    for size in range(1, max_team + 1):
        for team in combinations(assignments, size):
            if symmetry and not _canonical(team, domain, perms):
                continue
            search = _TeamSearch(psi, sig, team)
            hit = search.first()
            if hit is not None:
                return search.build(*hit)
    return None


# GF search by grounding to propositional SAT


class _Grounder:
    def __init__(self, domain):
        self.domain = domain
        self.clauses: list[list[int]] = []
        self.atoms: dict = {}
        self.top = 0
        self.memo: dict = {}

    def fresh(self) -> int:
        self.top += 1
        return self.top

    def atom(self, pred, args) -> int:
        key = (pred, args)
        v = self.atoms.get(key)
        if v is None:
            v = self.atoms[key] = self.fresh()
        return v

    def conj(self, lits):
        out = []
        for a in lits:
            if a is False:
                return False
            if a is not True:
                out.append(a)
        if not out:
            return True
        if len(out) == 1:
            return out[0]
        g = self.fresh()
        for a in out:
            self.clauses.append([-g, a])
        self.clauses.append([g] + [-a for a in out])
        return g

    def disj(self, lits):
        out = []
        for a in lits:
            if a is True:
                return True
            if a is not False:
                out.append(a)
        if not out:
            return False
        if len(out) == 1:
            return out[0]
        g = self.fresh()
        for a in out:
            self.clauses.append([g, -a])
        self.clauses.append([-g] + out)
        return g

    @staticmethod
    def neg(a):
        return (not a) if isinstance(a, bool) else -a

    def ground(self, f, s: dict):
        key = (f, tuple(sorted((x, s[x]) for x in fo.free_vars(f))))
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if isinstance(f, fo.Atom):
            out = self.atom(f.pred, tuple(s[x] for x in f.args))
        elif isinstance(f, fo.Eq):
            out = s[f.left] == s[f.right]
        elif isinstance(f, fo.Verum):
            out = True
        elif isinstance(f, fo.Not):
            out = self.neg(self.ground(f.sub, s))
        elif isinstance(f, fo.And):
            out = self.conj([self.ground(f.left, s), self.ground(f.right, s)])
        elif isinstance(f, (fo.Exists, fo.GuardedExists)):
            body = fo.matrix(f) if isinstance(f, fo.GuardedExists) else f.body
            lits = []
            for values in product(self.domain, repeat=len(f.vars)):
                s2 = dict(s)
                s2.update(zip(f.vars, values))
                lits.append(self.ground(body, s2))
            out = self.disj(lits)
        else:
            raise TypeError(f"not a first-order formula: {f!r}")
        self.memo[key] = out
        return out


@dataclass(frozen=True)
class GfWitness:
    model: StandardModel
    assignment: dict


def brute_sat_gf(phi: fo.Formula, max_domain: int = 3, arities: dict | None = None,
                 min_domain: int = 1) -> GfWitness | None:
    """Smallest model of phi with at most ``max_domain`` elements, if any.

    Each domain size is grounded to propositional clauses and handed to a
    SAT solver; free variables are existentially closed and the witnessing
    assignment is returned with the model.
    """
    if max_domain < 1:
        raise PreconditionError("bounds must be at least 1")
    rels = dict(fo.relations_used(phi))
    if arities:
        rels.update(arities)
    xs = sorted(fo.free_vars(phi))
    for n in range(max(1, min_domain), max_domain + 1):
        domain = element_names(n)
        g = _Grounder(domain)
        per_assignment = []
        for values in product(domain, repeat=len(xs)):
            s = dict(zip(xs, values))
            per_assignment.append((s, g.ground(phi, s)))
        root = g.disj([lit for _, lit in per_assignment])
        if root is False:
            continue
        if root is not True:
            g.clauses.append([root])
        with Solver(name="cadical153", bootstrap_with=g.clauses) as solver:
            if not solver.solve():
                continue
            true_vars = {v for v in solver.get_model() or [] if v > 0}
        facts = {name: [] for name in rels}
        for (pred, args), v in g.atoms.items():
            if v in true_vars:
                facts[pred].append(args)
        model = StandardModel(tuple(domain), facts, rels)
        def val(lit):
            if isinstance(lit, bool):
                return lit
            return lit in true_vars if lit > 0 else -lit not in true_vars

        s = next(s for s, lit in per_assignment if val(lit))
        from .mcheck import eval_fo
        if not eval_fo(model, s, phi):
            raise AssertionError("grounding produced a model that fails the formula")
        return GfWitness(model, s)
    return None


# random corpora


DEFAULT_RELATIONS = {"P": 1, "Q": 2}


def random_lfd(rng: random.Random, sig: Signature, size: int = 6, e_depth: int = 2) -> lfd.Formula:
    """A random LFD formula with roughly ``size`` connectives."""
    rels = sorted(sig.relations.items())
    vars_ = sig.lfd_vars

    def subset():
        return frozenset(v for v in vars_ if rng.random() < 0.4)

    def leaf():
        if rng.random() < 0.3:
            return lfd.Dep(subset(), rng.choice(vars_))
        name, arity = rng.choice(rels)
        return lfd.Atom(name, tuple(rng.choice(vars_) for _ in range(arity)))

    def go(budget, depth):
        if budget <= 0:
            return leaf()
        r = rng.random()
        if r < 0.3:
            return lfd.Not(go(budget - 1, depth))
        if r < 0.6 or depth == 0:
            left = rng.randint(0, budget - 1)
            return lfd.And(go(left, depth), go(budget - 1 - left, depth))
        return lfd.E(subset(), go(budget - 1, depth - 1))

    return go(size, e_depth)


def random_gf(rng: random.Random, relations: dict, size: int = 5, e_depth: int = 2,
              free: tuple = (), nvars: int = 3) -> fo.Formula:
    """A random guarded formula whose free variables lie in ``free``."""
    names = [f"x{i}" for i in range(1, nvars + 1)]
    rels = sorted(relations.items())

    def quantified(budget, depth, free):
        name, arity = rng.choice(rels)
        keep = [x for x in free if rng.random() < 0.5][:arity - 1] if arity > 1 else []
        pool = [x for x in names if x not in keep] or names
        ys = []
        args = []
        for _ in range(arity):
            if keep and rng.random() < 0.5:
                args.append(rng.choice(keep))
            else:
                y = rng.choice(pool)
                if y not in ys:
                    ys.append(y)
                args.append(y)
        if not ys:
            y = rng.choice(pool)
            ys.append(y)
            args[rng.randrange(arity)] = y
        guard = fo.Atom(name, tuple(args))
        inner = tuple(sorted(set(args)))
        body = go(budget - 1, depth - 1, inner) if budget > 1 and rng.random() < 0.8 else None
        return fo.GuardedExists(guard, tuple(sorted(set(ys))), body)

    def go(budget, depth, free):
        candidates = [(n, a) for n, a in rels if free or a == 0]
        if budget <= 0 or depth <= 0 and free:
            if free:
                name, arity = rng.choice(candidates)
                return fo.Atom(name, tuple(rng.choice(free) for _ in range(arity)))
            return quantified(1, 1, free)
        r = rng.random()
        if r < 0.25:
            return fo.Not(go(budget - 1, depth, free))
        if r < 0.5 and free:
            left = rng.randint(0, budget - 1)
            return fo.And(go(left, depth, free), go(budget - 1 - left, depth, free))
        if depth > 0:
            return quantified(budget, depth, free)
        return fo.Not(go(budget - 1, depth, free))

    out = go(size, e_depth, tuple(free))
    assert fo.is_guarded(out), out
    return out


def random_dependence_model(rng: random.Random, sig: Signature, max_domain: int = 3,
                            max_team: int = 4, density: float = 0.4) -> DependenceModel:
    n = rng.randint(1, max_domain)
    domain = element_names(n)
    pool = list(product(domain, repeat=sig.k))
    team = rng.sample(pool, rng.randint(1, min(max_team, len(pool))))
    rels = {name: [t for t in product(domain, repeat=a) if rng.random() < density]
            for name, a in sig.relations.items()}
    return DependenceModel(StandardModel(tuple(domain), rels, dict(sig.relations)), sig.lfd_vars, tuple(team))


def random_distinguished(rng: random.Random, sig: Signature, **kw) -> DependenceModel:
    return distinguish(random_dependence_model(rng, sig, **kw))[0]


def random_corpus(seed: int, kind: str, count: int, sig: Signature | None = None, **shape) -> list:
    """``count`` seeded objects of one kind: lfd, gf, model or distinguished."""
    rng = random.Random(seed)
    sig = sig or Signature(DEFAULT_RELATIONS, ("x", "y"))
    makers = {
        "lfd": lambda: random_lfd(rng, sig, **shape),
        "gf": lambda: random_gf(rng, sig.relations, **shape),
        "model": lambda: random_dependence_model(rng, sig, **shape),
        "distinguished": lambda: random_distinguished(rng, sig, **shape),
    }
    if kind not in makers:
        raise ValueError(f"unknown corpus kind {kind!r}")
    return [makers[kind]() for _ in range(count)]
