"""Standard models, dependence models, and the transformations between them.

Domain elements are opaque strings. Elements built from a variable ``v`` and
an old element ``m`` are written ``"v:m"``. An assignment is a tuple of
elements listed in the model's variable order.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterable, Mapping

from . import config
from .errors import PreconditionError, SignatureError, SizeCapError
from .syntax.signature import TEAM_RELATION, Signature, dep_relation_name

Assignment = tuple


def pair(v: str, m: str) -> str:
    return f"{v}:{m}"


@dataclass(frozen=True)
class StandardModel:
    domain: tuple
    relations: Mapping[str, frozenset]
    arities: Mapping[str, int]

    def __post_init__(self):
        domain = tuple(sorted(set(self.domain)))
        rels = {name: frozenset(tuple(t) for t in ts) for name, ts in self.relations.items()}
        arities = dict(self.arities)
        dom = set(domain)
        for name, ts in rels.items():
            if name not in arities:
                raise SignatureError(f"no arity given for relation {name!r}")
            for t in ts:
                if len(t) != arities[name]:
                    raise SignatureError(f"tuple {t} has wrong length for {name}/{arities[name]}")
                if not dom.issuperset(t):
                    raise SignatureError(f"tuple {t} of {name} leaves the domain")
        for name in arities:
            rels.setdefault(name, frozenset())
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "arities", arities)

    @classmethod
    def build(cls, domain: Iterable, relations: Mapping[str, Iterable], arities: Mapping[str, int] | None = None):
        relations = {k: [tuple(t) for t in v] for k, v in relations.items()}
        if arities is None:
            arities = {}
            for name, ts in relations.items():
                if not ts:
                    raise SignatureError(f"cannot infer the arity of empty relation {name!r}")
                arities[name] = len(ts[0])
        return cls(tuple(domain), relations, arities)

    def holds(self, pred: str, args: tuple) -> bool:
        return args in self.relations.get(pred, ())

    def restrict_relations(self, names: Iterable[str]) -> "StandardModel":
        names = set(names)
        return StandardModel(self.domain, {n: ts for n, ts in self.relations.items() if n in names},
                             {n: a for n, a in self.arities.items() if n in names})

    def with_relations(self, extra: Mapping[str, Iterable], arities: Mapping[str, int]) -> "StandardModel":
        rels = dict(self.relations)
        rels.update(extra)
        ar = dict(self.arities)
        ar.update(arities)
        return StandardModel(self.domain, rels, ar)

    def __hash__(self):
        return hash((self.domain, tuple(sorted(self.relations.items()))))


@dataclass(frozen=True)
class DependenceModel:
    """A standard model together with a team of admissible assignments."""

    base: StandardModel
    vars: tuple
    team: tuple

    def __post_init__(self):
        vars_ = tuple(self.vars)
        team = tuple(sorted(set(tuple(s) for s in self.team)))
        dom = set(self.base.domain)
        for s in team:
            if len(s) != len(vars_):
                raise SignatureError(f"assignment {s} is not total over {vars_}")
            if not dom.issuperset(s):
                raise SignatureError(f"assignment {s} leaves the domain")
        object.__setattr__(self, "vars", vars_)
        object.__setattr__(self, "team", team)

    def __hash__(self):
        return hash((self.base, self.vars, self.team))

    @property
    def k(self) -> int:
        return len(self.vars)

    @cached_property
    def index(self) -> dict:
        return {s: i for i, s in enumerate(self.team)}

    @cached_property
    def var_index(self) -> dict:
        return {v: i for i, v in enumerate(self.vars)}

    def assignment(self, values: Mapping[str, str]) -> Assignment:
        return tuple(values[v] for v in self.vars)

    def as_dict(self, s: Assignment) -> dict:
        return dict(zip(self.vars, s))

    def mask(self, vs: Iterable[str]) -> int:
        m = 0
        for v in vs:
            m |= 1 << self.var_index[v]
        return m

    def classes(self, vmask: int) -> list:
        """Team indices grouped by their values on the variables in ``vmask``.

        Returns ``(class_of, members)``: class id per team index, and the
        bitmask of team indices in each class.
        """
        cache = self.__dict__.setdefault("_classes", {})
        hit = cache.get(vmask)
        if hit is None:
            pos = [i for i in range(self.k) if vmask >> i & 1]
            ids: dict = {}
            class_of = []
            members: list = []
            for j, s in enumerate(self.team):
                key = tuple(s[i] for i in pos)
                c = ids.get(key)
                if c is None:
                    c = ids[key] = len(members)
                    members.append(0)
                members[c] |= 1 << j
                class_of.append(c)
            hit = cache[vmask] = (class_of, members)
        return hit

    def agreement_mask(self, i: int, j: int) -> int:
        s, t = self.team[i], self.team[j]
        return sum(1 << v for v in range(self.k) if s[v] == t[v])

    def require_nonempty(self):
        if not self.team:
            raise PreconditionError("the team is empty")


def _signature_vars(sig_or_vars) -> tuple:
    return sig_or_vars.lfd_vars if isinstance(sig_or_vars, Signature) else tuple(sig_or_vars)


def from_standard_T(hat: StandardModel, sig_or_vars) -> DependenceModel:
    """Read the team off the relation A and drop A from the relational part."""
    vars_ = _signature_vars(sig_or_vars)
    if TEAM_RELATION not in hat.arities:
        raise PreconditionError("model does not interpret the team relation A")
    if hat.arities[TEAM_RELATION] != len(vars_):
        raise SignatureError(f"A has arity {hat.arities[TEAM_RELATION]}, expected {len(vars_)}")
    base = hat.restrict_relations(n for n in hat.arities if n != TEAM_RELATION)
    return DependenceModel(base, vars_, tuple(hat.relations[TEAM_RELATION]))


def to_standard_Tinv(model: DependenceModel) -> StandardModel:
    return model.base.with_relations({TEAM_RELATION: model.team}, {TEAM_RELATION: model.k})


def full_F(M: StandardModel, sig_or_vars, cap: int | None = None) -> DependenceModel:
    vars_ = _signature_vars(sig_or_vars)
    if not M.domain:
        raise PreconditionError("full dependence models need a nonempty domain")
    cap = config.CAPS.full_team if cap is None else cap
    n = len(M.domain) ** len(vars_)
    if n > cap:
        raise SizeCapError(f"full team would have {n} assignments, cap is {cap}")
    return DependenceModel(M, vars_, tuple(product(M.domain, repeat=len(vars_))))


def drop_unnamed_G(model: DependenceModel) -> StandardModel:
    """Keep only the facts whose elements all occur in one team member's image."""
    images = {frozenset(s) for s in model.team}
    maximal = [img for img in images if not any(img < other for other in images)]
    rels = {}
    for name, ts in model.base.relations.items():
        rels[name] = [t for t in ts if any(img.issuperset(t) for img in maximal)]
    return StandardModel(model.base.domain, rels, model.base.arities)


def is_distinguished(model: DependenceModel) -> bool:
    owner: dict = {}
    for s in model.team:
        for v, m in zip(model.vars, s):
            if owner.setdefault(m, v) != v:
                return False
    return True


def distinguish(model: DependenceModel):
    """Tag every value with the variable carrying it.

    Returns the distinguished model and the bisimulation ``[(s, s_d), ...]``.
    """
    vars_ = model.vars
    relation = []
    team_d = []
    domain = set()
    for s in model.team:
        sd = tuple(pair(v, m) for v, m in zip(vars_, s))
        team_d.append(sd)
        relation.append((s, sd))
        domain.update(sd)
    rels = {}
    for name, arity in model.base.arities.items():
        facts = model.base.relations[name]
        out = set()
        for s in model.team:
            for us in product(range(len(vars_)), repeat=arity):
                if tuple(s[u] for u in us) in facts:
                    out.add(tuple(pair(vars_[u], s[u]) for u in us))
        rels[name] = out
    base = StandardModel(tuple(domain), rels, model.base.arities)
    return DependenceModel(base, vars_, tuple(team_d)), relation


def is_guarded_assignment(M: StandardModel, s: Mapping[str, str]) -> bool:
    image = set(s.values())
    if len(image) <= 1 and (not image or image <= set(M.domain)):
        return True
    return any(image <= set(t) for ts in M.relations.values() for t in ts)


def lift_distinguished(M: StandardModel, s: Mapping[str, str], sig_or_vars, cap: int | None = None):
    """Build a distinguished dependence model over ``dom(M) x V``.

    Returns ``(model, rho, t)`` where rho maps the first-order variables of
    ``s`` to LFD variables so that ``t`` composed with rho sends each x to
    ``(s(x), rho(x))``.
    """
    vars_ = _signature_vars(sig_or_vars)
    k = len(vars_)
    max_arity = max(M.arities.values(), default=0)
    if max_arity > k:
        raise PreconditionError(f"need at least {max_arity} LFD variables, have {k}")
    if not is_guarded_assignment(M, s):
        raise PreconditionError(f"assignment {dict(s)} is not guarded in the model")
    cap = config.CAPS.full_team if cap is None else cap
    if len(M.domain) ** k > cap:
        raise SizeCapError(f"lifted team would have {len(M.domain) ** k} assignments, cap is {cap}")

    rels = {}
    for name, arity in M.arities.items():
        out = set()
        for fact in M.relations[name]:
            for us in product(vars_, repeat=arity):
                if all(us[i] != us[j] for i in range(arity) for j in range(arity) if fact[i] != fact[j]):
                    out.add(tuple(pair(u, m) for m, u in zip(fact, us)))
        rels[name] = out
    domain = [pair(v, m) for m in M.domain for v in vars_]
    team = [tuple(pair(v, m) for v, m in zip(vars_, ms)) for ms in product(M.domain, repeat=k)]
    model = DependenceModel(StandardModel(tuple(domain), rels, M.arities), vars_, tuple(team))

    rho = {}
    slot = {}
    for x in sorted(s):
        m = s[x]
        if m not in slot:
            slot[m] = vars_[len(slot)]
        rho[x] = slot[m]
    m0 = M.domain[0]
    by_var = {v: m for m, v in slot.items()}
    t = tuple(pair(v, by_var.get(v, m0)) for v in vars_)
    assert t in model.index
    return model, rho, t


def expand_hat(model: DependenceModel, psi=None) -> StandardModel:
    """Expand to the signature with A and every ``R_{V}_{U}``.

    ``R_{V}_{U}`` holds of ``s(V)`` exactly when ``D_V U`` is true at s.
    ``psi`` is accepted for symmetry with the setup it is meant to satisfy;
    the expansion itself does not depend on it.
    """
    from .mcheck import dep_closure_mask

    vars_ = model.vars
    k = model.k
    rels: dict = {TEAM_RELATION: set(model.team)}
    arities = {TEAM_RELATION: k}
    subsets = range(1 << k)
    for vm in subsets:
        pos = [i for i in range(k) if vm >> i & 1]
        for um in subsets:
            name = dep_relation_name(_names(vars_, vm), _names(vars_, um), vars_)
            rels[name] = set()
            arities[name] = len(pos)
    for i, s in enumerate(model.team):
        for vm in subsets:
            cl = dep_closure_mask(model, i, vm)
            args = tuple(s[p] for p in range(k) if vm >> p & 1)
            for um in subsets:
                if um & ~cl == 0:
                    rels[dep_relation_name(_names(vars_, vm), _names(vars_, um), vars_)].add(args)
    return model.base.with_relations(rels, arities)


def _names(vars_, m):
    return [v for i, v in enumerate(vars_) if m >> i & 1]
