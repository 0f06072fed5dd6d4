"""First-order formulas, with guarded quantification as its own constructor.

``Or``, ``->`` and ``forall`` are sugar and never appear in trees: they are
desugared by the parser or by the helper constructors below.
"""
from __future__ import annotations

import enum
from functools import lru_cache
from typing import Iterable, Union

from ._node import node


@node
class Atom:
    pred: str
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@node
class Eq:
    left: str
    right: str


@node
class Verum:
    pass


@node
class And:
    left: "Formula"
    right: "Formula"


@node
class Not:
    sub: "Formula"


@node
class Exists:
    vars: tuple
    body: "Formula"

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))


@node
class GuardedExists:
    """``exists ys (guard & body)``; ``body=None`` means just the guard."""

    guard: Atom
    vars: tuple
    body: "Formula | None" = None

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))


Formula = Union[Atom, Eq, Verum, And, Not, Exists, GuardedExists]


class Guardedness(enum.Enum):
    NOT_GF = "not-GF"
    GF = "GF"
    SELF_GUARDED = "self-guarded-GF"

    @property
    def is_gf(self) -> bool:
        return self is not Guardedness.NOT_GF


def lor(a: Formula, b: Formula) -> Formula:
    return Not(And(Not(a), Not(b)))


def implies(a: Formula, b: Formula) -> Formula:
    return Not(And(a, Not(b)))


def conjoin(parts: list) -> Formula:
    if not parts:
        return Verum()
    if len(parts) == 1:
        return parts[0]
    mid = len(parts) // 2
    return And(conjoin(parts[:mid]), conjoin(parts[mid:]))


def disjoin(parts: list) -> Formula:
    if not parts:
        return Not(Verum())
    if len(parts) == 1:
        return parts[0]
    mid = len(parts) // 2
    return lor(disjoin(parts[:mid]), disjoin(parts[mid:]))


def guard_ok(guard: Atom, ys: Iterable[str], body) -> bool:
    gv = set(guard.args)
    if not set(ys) <= gv:
        return False
    return body is None or free_vars(body) <= gv


def exists(ys: Iterable[str], body: Formula) -> Formula:
    """Existential quantification, made guarded whenever the shape allows."""
    ys = tuple(ys)
    if not ys:
        return body
    if isinstance(body, Atom) and guard_ok(body, ys, None):
        return GuardedExists(body, ys, None)
    if isinstance(body, And) and isinstance(body.left, Atom) and guard_ok(body.left, ys, body.right):
        return GuardedExists(body.left, ys, body.right)
    return Exists(ys, body)


def forall(ys: Iterable[str], body: Formula) -> Formula:
    """``forall ys . body``; a body ``G -> f`` with G a valid guard stays guarded."""
    ys = tuple(ys)
    if not ys:
        return body
    if isinstance(body, Not) and isinstance(body.sub, And):
        g, rest = body.sub.left, body.sub.right
        if isinstance(g, Atom) and isinstance(rest, Not) and guard_ok(g, ys, rest.sub):
            return Not(GuardedExists(g, ys, rest))
    return Not(Exists(ys, Not(body)))


def guarded_forall(guard: Atom, ys: Iterable[str], body: Formula) -> Formula:
    return forall(ys, implies(guard, body))


def matrix(f: GuardedExists) -> Formula:
    """The full body ``guard & body`` of a guarded quantifier."""
    return f.guard if f.body is None else And(f.guard, f.body)


def children(f: Formula) -> tuple:
    if isinstance(f, And):
        return (f.left, f.right)
    if isinstance(f, Not):
        return (f.sub,)
    if isinstance(f, Exists):
        return (f.body,)
    if isinstance(f, GuardedExists):
        return (f.guard,) if f.body is None else (f.guard, f.body)
    return ()


@lru_cache(maxsize=200_000)
def free_vars(f: Formula) -> frozenset:
    if isinstance(f, Atom):
        return frozenset(f.args)
    if isinstance(f, Eq):
        return frozenset((f.left, f.right))
    if isinstance(f, Verum):
        return frozenset()
    if isinstance(f, Not):
        return free_vars(f.sub)
    if isinstance(f, And):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, Exists):
        return free_vars(f.body) - set(f.vars)
    if isinstance(f, GuardedExists):
        inner = frozenset(f.guard.args)
        if f.body is not None:
            inner |= free_vars(f.body)
        return inner - set(f.vars)
    raise TypeError(f"not a first-order formula: {f!r}")


@lru_cache(maxsize=200_000)
def size(f: Formula) -> int:
    return 1 + sum(size(c) for c in children(f))



def dag_size(f: Formula) -> int:
    """Number of distinct subformulas, i.e. the size with sharing."""
    return sum(1 for _ in subformulas(f))


def subformulas(f: Formula):
    seen = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        yield g
        stack.extend(children(g))


def relations_used(f: Formula) -> dict[str, int]:
    return {g.pred: len(g.args) for g in subformulas(f) if isinstance(g, Atom)}


def variables(f: Formula) -> set[str]:
    out = set()
    for g in subformulas(f):
        if isinstance(g, Atom):
            out.update(g.args)
        elif isinstance(g, Eq):
            out.update((g.left, g.right))
        elif isinstance(g, (Exists, GuardedExists)):
            out.update(g.vars)
    return out


def _gf(f: Formula, equality: bool) -> bool:
    for g in subformulas(f):
        if isinstance(g, Exists):
            return False
        if isinstance(g, Eq) and not equality:
            return False
        if isinstance(g, GuardedExists) and not guard_ok(g.guard, g.vars, g.body):
            return False
    return True


def top_conjuncts(f: Formula) -> list:
    if isinstance(f, And):
        return top_conjuncts(f.left) + top_conjuncts(f.right)
    return [f]


def is_self_guarded(f: Formula) -> bool:
    fv = free_vars(f)
    return any(isinstance(c, Atom) and fv <= set(c.args) for c in top_conjuncts(f))


def is_guarded(f: Formula, equality: bool = False) -> Guardedness:
    """Classify f as not-GF, GF, or self-guarded GF.

    Equality atoms are only admitted when ``equality`` is set.
    """
    if not _gf(f, equality):
        return Guardedness.NOT_GF
    return Guardedness.SELF_GUARDED if is_self_guarded(f) else Guardedness.GF
