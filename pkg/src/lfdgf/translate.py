"""Translations between LFD and (guarded) first-order logic.

``tr``        LFD -> FO over the signature plus the team relation A
``tr_bullet`` LFD -> GF, dependence atoms become ``R_{V}_{u}`` atoms
``setup``     GF sentences forcing the ``R`` relations to behave like dependence
``sigma``     ``tr_bullet & setup & A(v1..vk)``, equisatisfiable with its input
``tau``       GF -> LFD under a map rho from first-order to LFD variables
"""
from __future__ import annotations

from itertools import product
from typing import Mapping

from . import config
from .errors import PreconditionError, SignatureError, SizeCapError
from .syntax import fo, lfd
from .syntax.signature import TEAM_RELATION, Signature


def prime(v: str) -> str:
    return v + "'"


def team_atom(sig: Signature, vs=None) -> fo.Atom:
    return fo.Atom(TEAM_RELATION, tuple(sig.lfd_vars if vs is None else vs))


def _tr(phi, sig, dep_clause):
    memo: dict = {}

    def go(f):
        hit = memo.get(f)
        if hit is not None:
            return hit
        if isinstance(f, lfd.Atom):
            out = fo.Atom(f.pred, f.args)
        elif isinstance(f, lfd.And):
            out = fo.And(go(f.left), go(f.right))
        elif isinstance(f, lfd.Not):
            out = fo.Not(go(f.sub))
        elif isinstance(f, lfd.Dep):
            out = dep_clause(f)
        elif isinstance(f, lfd.E):
            out = _exists_admissible(sig, f.vars, go(f.body))
        else:
            raise TypeError(f"not an LFD formula: {f!r}")
        memo[f] = out
        return out

    return go(phi)


def _exists_admissible(sig: Signature, V, body: fo.Formula) -> fo.Formula:
    return fo.exists([v for v in sig.lfd_vars if v not in V], fo.And(team_atom(sig), body))


def tr(phi: lfd.Formula, sig: Signature) -> fo.Formula:
    """First-order translation; dependence atoms quantify over primed copies.

    ``D_V u`` becomes ``forall v1'..vk' (A(v') -> (AND_{v in V} v = v' -> u = u'))``,
    which is not guarded.
    """
    lfd.check(phi, sig)
    primed = tuple(prime(v) for v in sig.lfd_vars)

    def dep(f):
        eqs = [fo.Eq(v, prime(v)) for v in sig.ordered(f.vars)]
        inner = fo.implies(fo.conjoin(eqs), fo.Eq(f.target, prime(f.target))) if eqs \
            else fo.Eq(f.target, prime(f.target))
        return fo.forall(primed, fo.implies(team_atom(sig, primed), inner))

    return _tr(phi, sig, dep)


def dep_atom(sig: Signature, V, u) -> fo.Atom:
    return fo.Atom(sig.dep_relation(V, [u]), sig.ordered(V))


def dep_set_atom(sig: Signature, V, U) -> fo.Formula:
    """``R^{V,U}(v)`` read as the conjunction of its singleton-target atoms."""
    return fo.conjoin([dep_atom(sig, V, u) for u in sig.ordered(U)])


def tr_bullet(phi: lfd.Formula, sig: Signature) -> fo.Formula:
    lfd.check(phi, sig)
    return _tr(phi, sig, lambda f: dep_atom(sig, f.vars, f.target))


def _for_all_admissible(sig: Signature, body: fo.Formula) -> fo.Formula:
    return fo.forall(sig.lfd_vars, fo.implies(team_atom(sig), body))


def setup_parts(psi: lfd.Formula, sig: Signature, cl=None) -> dict[str, list]:
    """The three families of setup sentences, each in a fixed order."""
    if cl is None:
        cl = lfd.closure(psi, sig)
    subsets = sig.subsets()
    projection = [_for_all_admissible(sig, dep_set_atom(sig, V, V)) for V in subsets]
    transitivity = [
        _for_all_admissible(sig, fo.implies(
            fo.And(dep_set_atom(sig, V, U), dep_set_atom(sig, U, W)), dep_set_atom(sig, V, W)))
        for V, U, W in product(subsets, repeat=3)
    ]
    transfer = []
    for xi in cl:
        if lfd.is_decomposable(xi):
            continue
        body = tr_bullet(xi, sig)
        for V, U in product(subsets, repeat=2):
            premise = fo.And(dep_set_atom(sig, V, U), _exists_admissible(sig, V, body))
            transfer.append(_for_all_admissible(sig, fo.implies(premise, _exists_admissible(sig, V | U, body))))
    return {"projection": projection, "transitivity": transitivity, "transfer": transfer}


def setup_conjuncts(psi: lfd.Formula, sig: Signature) -> list:
    parts = setup_parts(psi, sig)
    return parts["projection"] + parts["transitivity"] + parts["transfer"]


def setup(psi: lfd.Formula, sig: Signature) -> fo.Formula:
    return fo.conjoin(setup_conjuncts(psi, sig))


def sigma(psi: lfd.Formula, sig: Signature) -> fo.Formula:
    return fo.conjoin([tr_bullet(psi, sig), setup(psi, sig), team_atom(sig)])


# GF -> LFD


def _rho_key(rho: Mapping[str, str], fv) -> tuple:
    return tuple(sorted((x, rho[x]) for x in fv))


def tau(phi: fo.Formula, rho: Mapping[str, str], sig: Signature, equality: bool = False,
        node_cap: int | None = None) -> lfd.Formula:
    """Translate a guarded formula under ``rho: free(phi) -> LFD variables``.

    Atoms of the expanded signature are handled too: ``A(x)`` becomes true
    exactly when rho maps x onto the variable sequence itself, and
    ``R_{U}_{V}(x)`` becomes ``D_U V`` when rho maps x onto U's canonical
    enumeration (false otherwise, as no distinguished model realises it).
    """
    missing = fo.free_vars(phi) - set(rho)
    if missing:
        raise PreconditionError(f"rho does not cover the free variables {sorted(missing)}")
    for v in rho.values():
        sig.index(v)
    cap = config.CAPS.tau_nodes if node_cap is None else node_cap
    top, bottom = lfd.top(sig), lfd.bottom(sig)
    memo: dict = {}

    # fold the constants so translations of expanded-signature formulas stay small
    def _not(a):
        if a == top:
            return bottom
        if a == bottom:
            return top
        return a.sub if isinstance(a, lfd.Not) else lfd.Not(a)

    def _and(a, b):
        if a == bottom or b == bottom:
            return bottom
        if a == top:
            return b
        return a if b == top else lfd.And(a, b)

    def atom(f, r):
        args = tuple(r[x] for x in f.args)
        if f.pred == TEAM_RELATION:
            return top if args == sig.lfd_vars else bottom
        dep = sig.parse_dep_relation(f.pred) if f.pred.startswith("R_") else None
        if dep is not None:
            U, V = dep
            if args != sig.ordered(U):
                return bottom
            return lfd.conjoin([lfd.Dep(U, v) for v in sig.ordered(V)]) if V else top
        return lfd.Atom(f.pred, args)

    def go(f, r):
        key = (f, _rho_key(r, fo.free_vars(f)))
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(f, fo.Atom):
            out = atom(f, r)
        elif isinstance(f, fo.Eq):
            if not equality:
                raise PreconditionError("equality atoms need equality mode")
            out = top if r[f.left] == r[f.right] else bottom
        elif isinstance(f, fo.Verum):
            out = top
        elif isinstance(f, fo.And):
            left = go(f.left, r)
            out = bottom if left == bottom else _and(left, go(f.right, r))
        elif isinstance(f, fo.Not):
            out = _not(go(f.sub, r))
        elif isinstance(f, fo.GuardedExists):
            if not fo.guard_ok(f.guard, f.vars, f.body):
                raise PreconditionError(f"quantifier over {f.vars} is not properly guarded")
            xs = sorted(fo.free_vars(f))
            keep = frozenset(r[x] for x in xs)
            base = {x: r[x] for x in xs}
            body = fo.matrix(f)
            disjuncts = []
            for choice in product(sig.lfd_vars, repeat=len(f.vars)):
                r2 = dict(base)
                r2.update(zip(f.vars, choice))
                inner = go(body, r2)
                if inner != bottom:
                    disjuncts.append(inner if inner == top else lfd.E(keep, inner))
            out = top if top in disjuncts else lfd.disjoin(disjuncts) if disjuncts else bottom
        elif isinstance(f, fo.Exists):
            raise PreconditionError(f"unguarded quantifier over {f.vars}")
        else:
            raise TypeError(f"not a first-order formula: {f!r}")
        memo[key] = out
        if len(memo) > cap:
            raise SizeCapError(f"tau output exceeds {cap} nodes")
        return out

    return go(phi, dict(rho))


def tau_all(phi: fo.Formula, sig: Signature, equality: bool = False) -> list[tuple[dict, lfd.Formula]]:
    """``tau`` under every map from the free variables of phi into the LFD variables."""
    arities = [a for name, a in fo.relations_used(phi).items()
               if name != TEAM_RELATION and not name.startswith("R_")]
    need = max(arities + [sig.max_arity], default=0)
    if need > sig.k:
        raise PreconditionError(f"need at least {need} LFD variables, have {sig.k}")
    xs = sorted(fo.free_vars(phi))
    out = []
    for choice in product(sig.lfd_vars, repeat=len(xs)):
        rho = dict(zip(xs, choice))
        out.append((rho, tau(phi, rho, sig, equality)))
    return out


def check_signature(phi: fo.Formula, sig: Signature, hat: bool = False) -> None:
    known = sig.hat_relations() if hat else sig.relations
    for name, arity in fo.relations_used(phi).items():
        if name not in known:
            raise SignatureError(f"unknown relation {name!r}")
        if known[name] != arity:
            raise SignatureError(f"{name} has arity {known[name]}, used with {arity}")
