"""Abstract syntax of the Logic of Functional Dependence.

Formulas are immutable trees over five constructors::

    Atom(P, (v1, ..., vn))   relational atom over LFD variables
    Dep(V, u)                u is locally determined by the variable set V
    And(f, g), Not(f)
    E(V, f)                  some admissible assignment agreeing on V satisfies f

Disjunction and the constants are derived: ``lor`` builds ``~(~f & ~g)``,
``top(sig)`` is the projection atom ``D[v1] v1`` (true at every assignment).
"""
from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator, Union

from .. import config
from ..errors import SignatureError, SizeCapError
from ._node import node
from .signature import Signature


@node
class Atom:
    pred: str
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@node
class Dep:
    vars: frozenset
    target: str

    def __post_init__(self):
        object.__setattr__(self, "vars", frozenset(self.vars))


@node
class And:
    left: "Formula"
    right: "Formula"


@node
class Not:
    sub: "Formula"


@node
class E:
    vars: frozenset
    body: "Formula"

    def __post_init__(self):
        object.__setattr__(self, "vars", frozenset(self.vars))


Formula = Union[Atom, Dep, And, Not, E]


def dep_set(V: Iterable[str], U: Iterable[str]) -> Formula:
    """``D_V U``: the conjunction of ``D_V u`` over u in U (U nonempty)."""
    U = list(U)
    if not U:
        raise SignatureError("D_V U needs a nonempty target set")
    return conjoin([Dep(V, u) for u in U])


def lor(a: Formula, b: Formula) -> Formula:
    return Not(And(Not(a), Not(b)))


def conjoin(parts: list) -> Formula:
    if not parts:
        raise ValueError("empty conjunction")
    if len(parts) == 1:
        return parts[0]
    mid = len(parts) // 2
    return And(conjoin(parts[:mid]), conjoin(parts[mid:]))


def disjoin(parts: list) -> Formula:
    if not parts:
        raise ValueError("empty disjunction")
    if len(parts) == 1:
        return parts[0]
    mid = len(parts) // 2
    return lor(disjoin(parts[:mid]), disjoin(parts[mid:]))


def top(sig: Signature) -> Formula:
    v = sig.lfd_vars[0]
    return Dep(frozenset([v]), v)


def bottom(sig: Signature) -> Formula:
    return Not(top(sig))


def as_disjunction(f: Formula):
    """Return ``(a, b)`` if f has the shape ``~(~a & ~b)``, else None."""
    if isinstance(f, Not) and isinstance(f.sub, And):
        l, r = f.sub.left, f.sub.right
        if isinstance(l, Not) and isinstance(r, Not):
            return l.sub, r.sub
    return None


@lru_cache(maxsize=200_000)
def free_vars(f: Formula) -> frozenset:
    if isinstance(f, Atom):
        return frozenset(f.args)
    if isinstance(f, (Dep, E)):
        return f.vars
    if isinstance(f, Not):
        return free_vars(f.sub)
    if isinstance(f, And):
        return free_vars(f.left) | free_vars(f.right)
    raise TypeError(f"not an LFD formula: {f!r}")


def single_negation(f: Formula) -> Formula:
    return f.sub if isinstance(f, Not) else Not(f)


def children(f: Formula) -> tuple:
    if isinstance(f, And):
        return (f.left, f.right)
    if isinstance(f, Not):
        return (f.sub,)
    if isinstance(f, E):
        return (f.body,)
    return ()



def dag_size(f: Formula) -> int:
    """Number of distinct subformulas, i.e. the size with sharing."""
    return sum(1 for _ in subformulas(f))


def subformulas(f: Formula) -> Iterator[Formula]:
    seen = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        yield g
        stack.extend(children(g))


@lru_cache(maxsize=200_000)
def size(f: Formula) -> int:
    return 1 + sum(size(c) for c in children(f))


@lru_cache(maxsize=200_000)
def e_depth(f: Formula) -> int:
    """Nesting depth of the E modality."""
    d = max((e_depth(c) for c in children(f)), default=0)
    return d + 1 if isinstance(f, E) else d


def is_decomposable(f: Formula) -> bool:
    return isinstance(f, (And, Not))


def check(f: Formula, sig: Signature) -> None:
    """Raise SignatureError unless every variable and atom fits ``sig``."""
    for g in subformulas(f):
        if isinstance(g, Atom):
            if g.pred not in sig.relations:
                raise SignatureError(f"unknown relation {g.pred!r}")
            if len(g.args) != sig.relations[g.pred]:
                raise SignatureError(
                    f"{g.pred} has arity {sig.relations[g.pred]}, applied to {len(g.args)} variables")
            for v in g.args:
                sig.index(v)
        elif isinstance(g, Dep):
            sig.index(g.target)
            for v in g.vars:
                sig.index(v)
        elif isinstance(g, E):
            for v in g.vars:
                sig.index(v)
        elif not isinstance(g, (And, Not)):
            raise TypeError(f"not an LFD formula: {g!r}")


def dep_atoms(sig: Signature) -> list[Dep]:
    """All ``D_V u`` in canonical order: V by mask, then u by variable order."""
    return [Dep(V, u) for V, u in product(sig.subsets(), sig.lfd_vars)]


def sort_key(f: Formula, sig: Signature):
    """Total order on formulas: by size, then structurally."""
    return (size(f), _skey(f, sig))


def _skey(f, sig):
    if isinstance(f, Atom):
        return (0, f.pred, tuple(sig.index(v) for v in f.args))
    if isinstance(f, Dep):
        return (1, sig.mask(f.vars), sig.index(f.target))
    if isinstance(f, Not):
        return (2, _skey(f.sub, sig))
    if isinstance(f, And):
        return (3, _skey(f.left, sig), _skey(f.right, sig))
    return (4, sig.mask(f.vars), _skey(f.body, sig))


def closure(psi: Formula, sig: Signature, cap: int | None = None) -> list[Formula]:
    """Cl(psi) in canonical order (subformulas always precede their parents).

    Smallest set containing psi and every ``D_V u``, closed under subformulas
    and single negation.
    """
    check(psi, sig)
    base = set(subformulas(psi))
    base.update(dep_atoms(sig))
    cl = base | {single_negation(g) for g in base}
    cap = config.CAPS.closure if cap is None else cap
    if len(cl) > cap:
        raise SizeCapError(f"closure has {len(cl)} members, cap is {cap}")
    return sorted(cl, key=lambda g: sort_key(g, sig))
