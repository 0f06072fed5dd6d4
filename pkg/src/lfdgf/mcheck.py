"""Model checking for LFD and first-order logic, and dependence bisimulations."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping

from .errors import PreconditionError, SignatureError
from .models import Assignment, DependenceModel, StandardModel
from .syntax import fo, lfd


class LfdEvaluator:
    """Evaluates LFD formulas at every team member at once.

    ``extension(phi)`` is the bitmask of team indices where phi holds.
    Results are memoised per subformula, so repeated queries against one
    model share work.
    """

    def __init__(self, model: DependenceModel):
        self.model = model
        self.full = (1 << len(model.team)) - 1
        self.memo: dict = {}

    def _vmask(self, vs) -> int:
        try:
            return self.model.mask(vs)
        except KeyError as e:
            raise SignatureError(f"{e.args[0]!r} is not a variable of the model") from None

    def extension(self, phi: lfd.Formula) -> int:
        hit = self.memo.get(phi)
        if hit is not None:
            return hit
        out = self._compute(phi)
        self.memo[phi] = out
        return out

    def _compute(self, phi) -> int:
        model = self.model
        if isinstance(phi, lfd.Atom):
            facts = model.base.relations.get(phi.pred)
            if facts is None:
                raise SignatureError(f"model does not interpret {phi.pred!r}")
            if len(phi.args) != model.base.arities[phi.pred]:
                raise SignatureError(f"{phi.pred} applied to {len(phi.args)} arguments")
            pos = [model.var_index.get(v) for v in phi.args]
            if None in pos:
                raise SignatureError(f"unknown variable in {phi}")
            out = 0
            for j, s in enumerate(model.team):
                if tuple(s[p] for p in pos) in facts:
                    out |= 1 << j
            return out
        if isinstance(phi, lfd.Not):
            return self.full & ~self.extension(phi.sub)
        if isinstance(phi, lfd.And):
            left = self.extension(phi.left)
            return left & self.extension(phi.right) if left else 0
        if isinstance(phi, lfd.Dep):
            vm = self._vmask(phi.vars)
            um = vm | self._vmask([phi.target])
            if um == vm:
                return self.full
            cls_v, mem_v = model.classes(vm)
            cls_u, mem_u = model.classes(um)
            out = 0
            for j in range(len(model.team)):
                if mem_v[cls_v[j]] == mem_u[cls_u[j]]:
                    out |= 1 << j
            return out
        if isinstance(phi, lfd.E):
            inner = self.extension(phi.body)
            if not inner:
                return 0
            _, mem = model.classes(self._vmask(phi.vars))
            out = 0
            for members in mem:
                if members & inner:
                    out |= members
            return out
        raise TypeError(f"not an LFD formula: {phi!r}")

    def holds(self, s: Assignment, phi: lfd.Formula) -> bool:
        j = self.model.index.get(tuple(s))
        if j is None:
            raise PreconditionError(f"assignment {s} is not in the team")
        return bool(self.extension(phi) >> j & 1)


def eval_lfd(model: DependenceModel, s: Assignment | Mapping[str, str], phi: lfd.Formula) -> bool:
    if isinstance(s, Mapping):
        s = model.assignment(s)
    model.require_nonempty()
    return LfdEvaluator(model).holds(s, phi)


def dep_closure_mask(model: DependenceModel, j: int, vmask: int) -> int:
    cls_v, mem_v = model.classes(vmask)
    group = mem_v[cls_v[j]]
    out = vmask
    for u in range(model.k):
        if not vmask >> u & 1:
            cls_u, mem_u = model.classes(vmask | 1 << u)
            if mem_u[cls_u[j]] == group:
                out |= 1 << u
    return out


def dep_closure(model: DependenceModel, s: Assignment, V: Iterable[str]) -> frozenset:
    """Variables locally determined by V at s."""
    j = model.index.get(tuple(s))
    if j is None:
        raise PreconditionError(f"assignment {s} is not in the team")
    m = dep_closure_mask(model, j, model.mask(V))
    return frozenset(v for i, v in enumerate(model.vars) if m >> i & 1)


def agreement_set(s: Mapping[str, str], t: Mapping[str, str]) -> frozenset:
    return frozenset(v for v in s if v in t and s[v] == t[v])


# first-order semantics


def eval_fo(M: StandardModel, s: Mapping[str, str], phi: fo.Formula) -> bool:
    missing = fo.free_vars(phi) - set(s)
    if missing:
        raise PreconditionError(f"unassigned free variables {sorted(missing)}")
    return _fo(M, dict(s), phi)


def _fo(M, s, phi) -> bool:
    if isinstance(phi, fo.Atom):
        facts = M.relations.get(phi.pred)
        if facts is None:
            raise SignatureError(f"model does not interpret {phi.pred!r}")
        return tuple(s[x] for x in phi.args) in facts
    if isinstance(phi, fo.And):
        return _fo(M, s, phi.left) and _fo(M, s, phi.right)
    if isinstance(phi, fo.Not):
        return not _fo(M, s, phi.sub)
    if isinstance(phi, fo.Eq):
        return s[phi.left] == s[phi.right]
    if isinstance(phi, fo.Verum):
        return True
    if isinstance(phi, fo.GuardedExists):
        if not fo.guard_ok(phi.guard, phi.vars, phi.body):
            return _fo(M, s, fo.Exists(phi.vars, fo.matrix(phi)))
        facts = M.relations.get(phi.guard.pred)
        if facts is None:
            raise SignatureError(f"model does not interpret {phi.guard.pred!r}")
        bound = set(phi.vars)
        for fact in facts:
            binding = {}
            for x, m in zip(phi.guard.args, fact):
                if x in bound:
                    if binding.setdefault(x, m) != m:
                        break
                elif s[x] != m:
                    break
            else:
                if phi.body is None:
                    return True
                s2 = dict(s)
                s2.update(binding)
                if _fo(M, s2, phi.body):
                    return True
        return False
    if isinstance(phi, fo.Exists):
        for values in product(M.domain, repeat=len(phi.vars)):
            s2 = dict(s)
            s2.update(zip(phi.vars, values))
            if _fo(M, s2, phi.body):
                return True
        return False
    raise TypeError(f"not a first-order formula: {phi!r}")


# dependence bisimulations


@dataclass(frozen=True)
class Verdict:
    ok: bool
    clause: str | None = None
    pair: tuple | None = None
    detail: str = ""

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        out = {"ok": self.ok}
        if not self.ok:
            out.update(clause=self.clause, pair=[list(p) for p in self.pair] if self.pair else None,
                       detail=self.detail)
        return out


def _profiles(m1, m2):
    names = sorted(set(m1.base.arities) | set(m2.base.arities))
    for name in names:
        a1, a2 = m1.base.arities.get(name), m2.base.arities.get(name)
        if a1 is not None and a2 is not None and a1 != a2:
            raise SignatureError(f"{name} has arity {a1} in one model and {a2} in the other")

    def prof(model, s):
        k = model.k
        out = []
        for name in names:
            arity = model.base.arities.get(name) or m1.base.arities.get(name) or m2.base.arities.get(name)
            facts = model.base.relations.get(name, frozenset())
            out.append(tuple(tuple(s[u] for u in us) in facts for us in product(range(k), repeat=arity)))
        return tuple(out)

    return [prof(m1, s) for s in m1.team], [prof(m2, s) for s in m2.team]


class _BisimContext:
    def __init__(self, m1: DependenceModel, m2: DependenceModel):
        if m1.vars != m2.vars:
            raise SignatureError("models use different LFD variables")
        self.m1, self.m2 = m1, m2
        self.p1, self.p2 = _profiles(m1, m2)

    def agree1(self, i, j):
        return self.m1.agreement_mask(i, j)

    def agree2(self, i, j):
        return self.m2.agreement_mask(i, j)

    def forth_ok(self, i, i2, zrow) -> tuple[bool, str]:
        """Forth clause for the pair (team1[i], team2[i2]); zrow[t] = bitmask of t' related to t."""
        m1, m2 = self.m1, self.m2
        for t in range(len(m1.team)):
            a = self.agree1(i, t)
            if dep_closure_mask(m2, i2, a) != a:
                return False, f"agreement set with {m1.team[t]} is not dependence-closed at the partner"
            cls, mem = m2.classes(a)
            if not zrow[t] & mem[cls[i2]]:
                return False, f"no matching partner for {m1.team[t]}"
        return True, ""

    def back_ok(self, i, i2, zcol) -> tuple[bool, str]:
        m1, m2 = self.m1, self.m2
        for t2 in range(len(m2.team)):
            a = self.agree2(i2, t2)
            if dep_closure_mask(m1, i, a) != a:
                return False, f"agreement set with {m2.team[t2]} is not dependence-closed at the partner"
            cls, mem = m1.classes(a)
            if not zcol[t2] & mem[cls[i]]:
                return False, f"no matching partner for {m2.team[t2]}"
        return True, ""


def check_dep_bisim(m1: DependenceModel, m2: DependenceModel, Z: Iterable[tuple]) -> Verdict:
    """Verify that Z is a (total) dependence bisimulation between m1 and m2."""
    ctx = _BisimContext(m1, m2)
    pairs = []
    for s, s2 in Z:
        s, s2 = tuple(s), tuple(s2)
        if s not in m1.index or s2 not in m2.index:
            return Verdict(False, "domain", (s, s2), "pair is not drawn from the two teams")
        pairs.append((m1.index[s], m2.index[s2]))
    left = {i for i, _ in pairs}
    right = {j for _, j in pairs}
    if len(left) != len(m1.team):
        missing = next(s for i, s in enumerate(m1.team) if i not in left)
        return Verdict(False, "total", (missing, ()), "assignment of the first team is unrelated")
    if len(right) != len(m2.team):
        missing = next(s for i, s in enumerate(m2.team) if i not in right)
        return Verdict(False, "total", ((), missing), "assignment of the second team is unrelated")
    zrow = [0] * len(m1.team)
    zcol = [0] * len(m2.team)
    for i, j in pairs:
        zrow[i] |= 1 << j
        zcol[j] |= 1 << i
    for i, j in pairs:
        pair = (m1.team[i], m2.team[j])
        if ctx.p1[i] != ctx.p2[j]:
            return Verdict(False, "atom", pair, "atomic facts differ")
        ok, why = ctx.forth_ok(i, j, zrow)
        if not ok:
            return Verdict(False, "forth", pair, why)
        ok, why = ctx.back_ok(i, j, zcol)
        if not ok:
            return Verdict(False, "back", pair, why)
    return Verdict(True)


def greatest_dep_bisim(m1: DependenceModel, m2: DependenceModel):
    """Largest dependence bisimulation, or None when it is not total."""
    ctx = _BisimContext(m1, m2)
    n1, n2 = len(m1.team), len(m2.team)
    Z = {(i, j) for i in range(n1) for j in range(n2) if ctx.p1[i] == ctx.p2[j]}
    changed = True
    while changed:
        changed = False
        zrow = [0] * n1
        zcol = [0] * n2
        for i, j in Z:
            zrow[i] |= 1 << j
            zcol[j] |= 1 << i
        for i, j in sorted(Z):
            if not (ctx.forth_ok(i, j, zrow)[0] and ctx.back_ok(i, j, zcol)[0]):
                Z.discard((i, j))
                zrow[i] &= ~(1 << j)
                zcol[j] &= ~(1 << i)
                changed = True
    if {i for i, _ in Z} != set(range(n1)) or {j for _, j in Z} != set(range(n2)):
        return None
    return sorted((m1.team[i], m2.team[j]) for i, j in Z)
