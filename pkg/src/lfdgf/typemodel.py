"""Types over the closure of a formula, type models, and their unravelling.

A type is stored as a Python int whose bit ``i`` says whether the ``i``-th
closure formula (in canonical order) belongs to it. Enumeration and type
elimination work on numpy boolean tables with one row per type.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations

import numpy as np

from . import config
from .errors import PreconditionError, SizeCapError
from .syntax import lfd
from .syntax.signature import Signature


# closure tables


@lru_cache(maxsize=None)
def closure_operators(k: int) -> tuple:
    """All closure operators on k variables, as tuples ``cl[vmask] -> mask``.

    Built from their families of closed sets: the families that contain the
    full set and are closed under intersection.
    """
    if k > 4:
        raise SizeCapError(f"closure operators are only tabulated up to 4 variables, got {k}")
    full = (1 << k) - 1
    proper = list(range(full))
    ops = []
    for pick in range(1 << len(proper)):
        family = [m for i, m in enumerate(proper) if pick >> i & 1] + [full]
        fam = set(family)
        if any(a & b not in fam for a, b in combinations(family, 2)):
            continue
        cl = []
        for vm in range(full + 1):
            c = full
            for m in family:
                if vm & ~m == 0:
                    c &= m
            cl.append(c)
        ops.append(tuple(cl))
    return tuple(ops)


class Closure:
    """The canonical closure of psi with precomputed structure per entry."""

    def __init__(self, psi: lfd.Formula, sig: Signature):
        lfd.check(psi, sig)
        self.psi = psi
        self.sig = sig
        self.formulas = tuple(lfd.closure(psi, sig))
        self.n = len(self.formulas)
        self.index = {f: i for i, f in enumerate(self.formulas)}
        self.neg = [self.index[lfd.single_negation(f)] for f in self.formulas]
        self.free = [sig.mask(lfd.free_vars(f)) for f in self.formulas]
        self.dep = {}      # (vmask, u) -> index of D_V u
        self.exists = []   # (index, vmask, body index)
        self.atoms = []
        for i, f in enumerate(self.formulas):
            if isinstance(f, lfd.Dep):
                self.dep[(sig.mask(f.vars), sig.index(f.target))] = i
            elif isinstance(f, lfd.E):
                self.exists.append((i, sig.mask(f.vars), self.index[f.body]))
            elif isinstance(f, lfd.Atom):
                self.atoms.append(i)
        self.psi_index = self.index[psi]

    def __eq__(self, other):
        return isinstance(other, Closure) and self.psi == other.psi and self.sig == other.sig

    def __hash__(self):
        return hash((self.psi, self.sig))

    @property
    def k(self) -> int:
        return self.sig.k

    def fragment_mask(self, vmask: int) -> int:
        """Bits of the closure formulas whose free variables lie inside vmask."""
        cache = self.__dict__.setdefault("_frag", {})
        hit = cache.get(vmask)
        if hit is None:
            hit = cache[vmask] = sum(1 << i for i, fm in enumerate(self.free) if fm & ~vmask == 0)
        return hit

    def dep_closure_mask(self, bits: int, vmask: int) -> int:
        out = 0
        for u in range(self.k):
            if bits >> self.dep[(vmask, u)] & 1:
                out |= 1 << u
        return out

    def to_json(self) -> list[str]:
        from .syntax import lfd_to_text
        return [lfd_to_text(f, self.sig) for f in self.formulas]


def closure_table(psi: lfd.Formula, sig: Signature) -> Closure:
    cl = _closure_table(psi, sig)
    # the cache may predate a lower cap
    if cl.n > config.CAPS.closure:
        raise SizeCapError(f"closure has {cl.n} members, cap is {config.CAPS.closure}")
    return cl


@lru_cache(maxsize=256)
def _closure_table(psi: lfd.Formula, sig: Signature) -> Closure:
    return Closure(psi, sig)


# types


@dataclass(frozen=True)
class Type:
    bits: int
    closure: Closure = field(compare=False, repr=False)

    def __contains__(self, phi) -> bool:
        i = self.closure.index.get(phi)
        if i is None:
            raise KeyError(f"{phi} is not in the closure")
        return bool(self.bits >> i & 1)

    def has(self, i: int) -> bool:
        return bool(self.bits >> i & 1)

    def formulas(self) -> list:
        return [f for i, f in enumerate(self.closure.formulas) if self.bits >> i & 1]

    def indices(self) -> list[int]:
        return [i for i in range(self.closure.n) if self.bits >> i & 1]


def sim_V(a: Type, b: Type, V) -> bool:
    """Agreement on the closure formulas whose free variables lie in V."""
    cl = a.closure
    if cl != b.closure:
        raise PreconditionError("types over different closures")
    m = cl.fragment_mask(V if isinstance(V, int) else cl.sig.mask(V))
    return a.bits & m == b.bits & m


def dep_closure_type(t: Type, V) -> frozenset:
    cl = t.closure
    vm = V if isinstance(V, int) else cl.sig.mask(V)
    return cl.sig.unmask(cl.dep_closure_mask(t.bits, vm))


def type_violations(bits: int, cl: Closure) -> list[str]:
    """Names of the type conditions that ``bits`` fails."""
    out = []
    has = lambda i: bool(bits >> i & 1)
    if any(has(i) == has(cl.neg[i]) for i in range(cl.n)):
        out.append("negation")
    for i, f in enumerate(cl.formulas):
        if isinstance(f, lfd.And) and has(i) != (has(cl.index[f.left]) and has(cl.index[f.right])):
            out.append("conjunction")
            break
    if any(has(b) and not has(i) for i, _, b in cl.exists):
        out.append("existential")
    k = cl.k
    if any(not has(cl.dep[(vm, u)]) for vm in range(1 << k) for u in range(k) if vm >> u & 1):
        out.append("projection")
    dc = [cl.dep_closure_mask(bits, vm) for vm in range(1 << k)]
    if any(um & ~dc[vm] == 0 and dc[um] & ~dc[vm] for vm in range(1 << k) for um in range(1 << k)):
        # D_V U and D_U W must give D_V W
        out.append("transitivity")
    return out


def is_type(bits: int, cl: Closure) -> bool:
    return not type_violations(bits, cl)


def _type_rows(cl: Closure) -> np.ndarray:
    """Boolean table of all types, one row each, built by propagation.

    Rows start from the admissible dependence configurations; each atom
    doubles the rows, each existential is forced true where its body holds
    and doubles the remaining rows, and conjunctions and negations are read
    off their parts.
    """
    cap = config.CAPS.types
    k = cl.k
    ops = closure_operators(k)
    cols: dict[int, np.ndarray] = {}
    for (vm, u), i in cl.dep.items():
        cols[i] = np.array([op[vm] >> u & 1 for op in ops], dtype=bool)
    rows = len(ops)

    def value(i):
        f = cl.formulas[i]
        if isinstance(f, lfd.Not):
            return ~value(cl.index[f.sub])
        return cols[i]

    exists = {i: b for i, _, b in cl.exists}
    for i, f in enumerate(cl.formulas):
        if isinstance(f, (lfd.Not, lfd.Dep)):
            continue
        if isinstance(f, lfd.Atom):
            cols = {j: np.concatenate([c, c]) for j, c in cols.items()}
            cols[i] = np.repeat(np.array([False, True]), rows)
            rows *= 2
        elif isinstance(f, lfd.And):
            cols[i] = value(cl.index[f.left]) & value(cl.index[f.right])
        elif isinstance(f, lfd.E):
            body = value(exists[i])
            free = ~body
            cols = {j: np.concatenate([c, c[free]]) for j, c in cols.items()}
            cols[i] = np.concatenate([body, np.ones(int(free.sum()), dtype=bool)])
            rows = len(cols[i])
        if rows > cap:
            raise SizeCapError(f"more than {cap} candidate types")
    table = np.empty((rows, cl.n), dtype=bool)
    for i in range(cl.n):
        table[:, i] = value(i)
    return table


def _row_ints(table: np.ndarray) -> list[int]:
    packed = np.packbits(table, axis=1, bitorder="little")
    return [int.from_bytes(r.tobytes(), "little") for r in packed]


def enumerate_types(psi: lfd.Formula, sig: Signature) -> list[Type]:
    cl = closure_table(psi, sig)
    return [Type(b, cl) for b in sorted(_row_ints(_type_rows(cl)))]


# type models


@dataclass(frozen=True)
class TypeModel:
    types: tuple
    closure: Closure = field(compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "types", tuple(sorted(set(self.types), key=lambda t: t.bits)))

    @property
    def psi(self) -> lfd.Formula:
        return self.closure.psi

    def __len__(self):
        return len(self.types)

    def __iter__(self):
        return iter(self.types)

    def to_json(self) -> dict:
        return {"closure": self.closure.to_json(), "types": [format(t.bits, "x") for t in self.types]}


@dataclass(frozen=True)
class TypeModelVerdict:
    ok: bool
    for_psi: bool
    clause: str | None = None
    culprit: Type | None = None
    formula: lfd.Formula | None = None
    detail: str = ""

    def __bool__(self):
        return self.ok


def _find_witness(cl: Closure, t: Type, vmask: int, body: int, pool) -> Type | None:
    w = cl.dep_closure_mask(t.bits, vmask)
    m = cl.fragment_mask(w)
    key = t.bits & m
    for c in pool:
        if c.bits >> body & 1 and c.bits & m == key:
            return c
    return None


def is_type_model(types, psi: lfd.Formula | None = None, sig: Signature | None = None) -> TypeModelVerdict:
    """Check the witness and universal conditions (and that members are types)."""
    types = list(types)
    if not types:
        return TypeModelVerdict(True, False, detail="empty set: vacuously a type model, not one for psi")
    cl = types[0].closure if psi is None else closure_table(psi, sig)
    for t in types:
        if t.closure != cl:
            return TypeModelVerdict(False, False, "closure", t, detail="types over different closures")
        bad = type_violations(t.bits, cl)
        if bad:
            return TypeModelVerdict(False, False, "type", t, detail="fails " + ", ".join(bad))
    first = types[0]
    for t in types[1:]:
        if not sim_V(first, t, 0):
            return TypeModelVerdict(False, False, "universal", t,
                                    detail="types disagree on formulas without free variables")
    for t in types:
        for i, vm, body in cl.exists:
            if t.has(i) and _find_witness(cl, t, vm, body, types) is None:
                return TypeModelVerdict(False, False, "witness", t, cl.formulas[i],
                                        detail="no witness type for this existential")
    for_psi = any(t.has(cl.psi_index) for t in types)
    return TypeModelVerdict(True, for_psi, detail="" if for_psi else "no type contains psi")


@dataclass(frozen=True)
class SatResult:
    sat: bool
    model: TypeModel | None
    stats: dict

    def __bool__(self):
        return self.sat


def _void_rows(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    return a.view(np.dtype((np.void, a.shape[1]))).ravel()


def _eliminate(cl: Closure, table: np.ndarray) -> tuple[np.ndarray, int]:
    """Greatest set of rows in which every existential has a witness row."""
    n_rows = len(table)
    alive = np.ones(n_rows, dtype=bool)
    packed = np.packbits(table, axis=1, bitorder="little")
    k = cl.k
    # dependence closure of every V, per row, as a small int
    dc = {}
    for vm in range(1 << k):
        acc = np.zeros(n_rows, dtype=np.int64)
        for u in range(k):
            acc |= table[:, cl.dep[(vm, u)]].astype(np.int64) << u
        dc[vm] = acc
    keys = {}

    def keyed(w):
        if w not in keys:
            mask = np.zeros(cl.n, dtype=bool)
            frag = cl.fragment_mask(w)
            mask[[i for i in range(cl.n) if frag >> i & 1]] = True
            keys[w] = _void_rows(packed & np.packbits(mask, bitorder="little"))
        return keys[w]

    rounds = 0
    changed = True
    while changed:
        rounds += 1
        changed = False
        for i, vm, body in cl.exists:
            demand = alive & table[:, i] & ~table[:, body]
            if not demand.any():
                continue
            supply = alive & table[:, body]
            for w in np.unique(dc[vm][demand]):
                rows = np.flatnonzero(demand & (dc[vm] == w))
                key = keyed(int(w))
                ok = np.isin(key[rows], key[supply])
                if not ok.all():
                    alive[rows[~ok]] = False
                    changed = True
    return alive, rounds


def _certificate(cl: Closure, pool: list[Type], root: Type) -> TypeModel:
    """Types reachable from root by picking witnesses, preferring chosen ones."""
    chosen = [root]
    seen = {root.bits}
    todo = [root]
    while todo:
        t = todo.pop()
        for i, vm, body in cl.exists:
            if not t.has(i) or t.has(body):
                continue
            w = _find_witness(cl, t, vm, body, chosen) or _find_witness(cl, t, vm, body, pool)
            if w is None:
                raise AssertionError("elimination left an unwitnessed existential")
            if w.bits not in seen:
                seen.add(w.bits)
                chosen.append(w)
                todo.append(w)
    return TypeModel(tuple(chosen), cl)


def sat_lfd(psi: lfd.Formula, sig: Signature) -> SatResult:
    """Decide satisfiability by type elimination.

    Witnesses always share the free-variable-free fragment, so eliminating
    over all candidates at once is the same as running each sentence profile
    separately. A SAT answer carries the types reachable from one surviving
    type containing psi.
    """
    cl = closure_table(psi, sig)
    table = _type_rows(cl)
    alive, rounds = _eliminate(cl, table)
    stats = {"closure": cl.n, "candidates": len(table), "survivors": int(alive.sum()), "rounds": rounds}
    hits = np.flatnonzero(alive & table[:, cl.psi_index])
    if not len(hits):
        return SatResult(False, None, stats)
    pool = [Type(b, cl) for b in _row_ints(table[alive])]
    root = Type(_row_ints(table[hits[:1]])[0], cl)
    model = _certificate(cl, pool, root)
    stats["certificate"] = len(model)
    return SatResult(True, model, stats)


# unravelling


def _closed_sets(cl: Closure, t: Type) -> set[int]:
    return {cl.dep_closure_mask(t.bits, vm) for vm in range(1 << cl.k)}


def meet_irreducibles(cl: Closure, t: Type) -> list[int]:
    """Closed sets (other than the full set) that are not meets of larger ones."""
    full = (1 << cl.k) - 1
    closed = _closed_sets(cl, t)
    out = []
    for m in sorted(closed):
        if m == full:
            continue
        meet = full
        for c in closed:
            if c != m and c & m == m:
                meet &= c
        if meet != m:
            out.append(m)
    return out


@dataclass(frozen=True)
class Node:
    path: str
    type: Type
    values: tuple
    level: int
    cluster: bool = False


@dataclass
class Unravelling:
    """A dependence model built from a type model, with each node's intended type.

    ``height[s]`` counts how many levels below s every witness demand is met
    (``inf`` when the whole subtree is complete); the truth of closure
    formulas is guaranteed where the height covers their budget.
    """

    model: object
    types: dict
    height: dict
    roots: list
    depth: int
    clusters: bool
    closure: Closure

    def __iter__(self):
        return iter((self.model, self.types))

    @cached_property
    def min_height(self) -> float:
        return min(self.height.values())

    @cached_property
    def budget(self) -> tuple[list, list]:
        return truth_budget(self.closure, self.min_height, self.clusters)

    def guaranteed(self, i: int, s) -> bool:
        T, F = self.budget
        need = T[i] if self.types[s].has(i) else F[i]
        return self.height[s] >= need


def truth_budget(cl: Closure, min_height: float, clusters: bool = True) -> tuple[list, list]:
    """Heights from which membership in a node's type decides truth there.

    ``T[i]``: height needed so that formula i in the type is true at the
    node; ``F[i]``: height needed so that its absence makes it false.
    Existentials need one level for their witness; a negative existential
    needs its body to be decided correctly everywhere in the model.
    """
    inf = float("inf")
    T = [0.0] * cl.n
    F = [0.0] * cl.n
    for i, f in enumerate(cl.formulas):
        if isinstance(f, lfd.Dep):
            T[i], F[i] = 0, (0 if clusters else 1)
        elif isinstance(f, lfd.Not):
            j = cl.index[f.sub]
            T[i], F[i] = F[j], T[j]
        elif isinstance(f, lfd.And):
            a, b = cl.index[f.left], cl.index[f.right]
            T[i], F[i] = max(T[a], T[b]), max(F[a], F[b])
        elif isinstance(f, lfd.E):
            j = cl.index[f.body]
            T[i], F[i] = T[j] + 1, (0 if F[j] <= min_height else inf)
    return T, F


def _plan_children(cl: Closure, tm: TypeModel, t: Type) -> list[tuple[int, Type]]:
    planned: list[tuple[int, Type]] = []
    for i, vm, body in cl.exists:
        if not t.has(i) or t.has(body):
            continue
        w = cl.dep_closure_mask(t.bits, vm)
        if any(pw == w and c.has(body) for pw, c in planned):
            continue
        m = cl.fragment_mask(w)
        witness = next((c for c in tm.types if c.has(body) and c.bits & m == t.bits & m), None)
        if witness is None:
            raise PreconditionError(f"no witness for {cl.formulas[i]}: not a type model")
        planned.append((w, witness))
    for (vm, u), i in cl.dep.items():
        if t.has(i):
            continue
        if any(vm & ~w == 0 and not w >> u & 1 for w, _ in planned):
            continue
        planned.append((cl.dep_closure_mask(t.bits, vm), t))
    return planned


def unravel(tm: TypeModel, depth: int | None = None, roots=None, clusters: bool = True) -> Unravelling:
    """Build a finite, depth-bounded tree model realising the types of tm.

    Each node copies its parent's values on the dependence closure that the
    demand it answers is about, with fresh values elsewhere. Every root
    shares the values of the variables fixed by ``D_{}`` atoms. With
    ``clusters`` each leaf is blown up into a small team of same-typed nodes
    that witnesses its failing dependence atoms.
    """
    cl = tm.closure
    verdict = is_type_model(tm.types)
    if not verdict.ok:
        raise PreconditionError(f"not a type model: {verdict.clause} ({verdict.detail})")
    if depth is None:
        depth = lfd.e_depth(cl.psi) + 1
    if depth < 0:
        raise PreconditionError("depth must be nonnegative")
    roots = list(tm.types if roots is None else roots)
    if not roots:
        raise PreconditionError("nothing to unravel")
    sig = cl.sig
    vars_ = sig.lfd_vars
    fixed = cl.dep_closure_mask(roots[0].bits, 0)
    for r in roots[1:]:
        if not sim_V(roots[0], r, fixed):
            raise PreconditionError("root types disagree on the variables fixed by D_{} atoms; "
                                    "no single dependence model realises them together")
    cap = config.CAPS.nodes
    nodes: list[Node] = []
    children: dict[str, list[str]] = {}

    def add(node):
        nodes.append(node)
        if len(nodes) > cap:
            raise SizeCapError(f"unravelled model exceeds {cap} nodes")

    frontier = []
    for n, r in enumerate(roots):
        path = f"r{n}"
        vals = tuple(f"*:{v}" if fixed >> i & 1 else f"{path}:{v}" for i, v in enumerate(vars_))
        node = Node(path, r, vals, 0)
        add(node)
        frontier.append(node)
    while frontier:
        nxt = []
        for node in frontier:
            children[node.path] = []
            if node.level == depth:
                continue
            for n, (w, ct) in enumerate(_plan_children(cl, tm, node.type)):
                path = f"{node.path}.{n}"
                vals = tuple(node.values[i] if w >> i & 1 else f"{path}:{v}" for i, v in enumerate(vars_))
                child = Node(path, ct, vals, node.level + 1)
                add(child)
                children[node.path].append(path)
                nxt.append(child)
        frontier = nxt

    def unmet(t: Type) -> bool:
        if any(t.has(i) and not t.has(b) for i, _, b in cl.exists):
            return True
        return not clusters and any(not t.has(i) for i in cl.dep.values())

    inf = float("inf")
    by_path = {nd.path: nd for nd in nodes}
    height: dict[str, float] = {}
    for nd in sorted(nodes, key=lambda x: -x.level):
        kids = children[nd.path]
        if nd.level == depth:
            height[nd.path] = 0 if unmet(nd.type) else inf
        else:
            height[nd.path] = 1 + min((height[c] for c in kids), default=inf)

    if clusters:
        for nd in [x for x in nodes if x.level == depth]:
            irr = meet_irreducibles(cl, nd.type)
            for b in range(1, 1 << len(irr)):
                vals = []
                for i, v in enumerate(vars_):
                    key = "".join(str(b >> j & 1) for j, m in enumerate(irr) if not m >> i & 1)
                    vals.append(nd.values[i] if "1" not in key else f"{nd.path}~{key}:{v}")
                member = Node(f"{nd.path}~{b}", nd.type, tuple(vals), nd.level, cluster=True)
                add(member)
                height[member.path] = height[nd.path]
                by_path[member.path] = member

    return _assemble(cl, nodes, height, depth, clusters, [by_path[f"r{n}"].values for n in range(len(roots))])


def _assemble(cl, nodes, height, depth, clusters, roots) -> Unravelling:
    from .models import DependenceModel, StandardModel

    sig = cl.sig
    rels: dict[str, set] = {name: set() for name in sig.relations}
    domain = set()
    types, heights = {}, {}
    for nd in nodes:
        domain.update(nd.values)
        types[nd.values] = nd.type
        heights[nd.values] = height[nd.path]
        for i in cl.atoms:
            if nd.type.has(i):
                a = cl.formulas[i]
                rels[a.pred].add(tuple(nd.values[sig.index(x)] for x in a.args))
    base = StandardModel(tuple(domain), rels, dict(sig.relations))
    model = DependenceModel(base, sig.lfd_vars, tuple(types))
    return Unravelling(model, types, heights, list(roots), depth, clusters, cl)


def truth_report(unr: Unravelling) -> dict:
    """Compare node types with model checking.

    ``budget_failures`` (must be empty) lists mismatches the budget covers;
    ``outside_budget`` counts mismatches it leaves open; ``dep_failures``
    lists dependence atoms that disagree at complete nodes;
    ``closure_failures`` lists node pairs whose agreement set is not closed
    in both intended types.
    """
    from .mcheck import LfdEvaluator

    cl = unr.closure
    model = unr.model
    ev = LfdEvaluator(model)
    ext = [ev.extension(f) for f in cl.formulas]
    budget_failures, dep_failures, outside = [], [], 0
    dep_idx = set(cl.dep.values())
    for j, s in enumerate(model.team):
        t = unr.types[s]
        for i in range(cl.n):
            if bool(ext[i] >> j & 1) == t.has(i):
                continue
            if unr.guaranteed(i, s):
                budget_failures.append((s, cl.formulas[i]))
            else:
                outside += 1
            if i in dep_idx and unr.height[s] >= 1:
                dep_failures.append((s, cl.formulas[i]))
    closure_failures = []
    n = len(model.team)
    for a in range(n):
        ta = unr.types[model.team[a]]
        for b in range(a + 1, n):
            agree = model.agreement_mask(a, b)
            tb = unr.types[model.team[b]]
            if cl.dep_closure_mask(ta.bits, agree) != agree or cl.dep_closure_mask(tb.bits, agree) != agree:
                closure_failures.append((model.team[a], model.team[b]))
    return {"budget_failures": budget_failures, "outside_budget": outside,
            "dep_failures": dep_failures, "closure_failures": closure_failures}


def literal_truth_lemma(unr: Unravelling) -> list:
    """Closure formulas of E-depth below the unravelling depth that a root gets wrong."""
    from .mcheck import LfdEvaluator

    cl = unr.closure
    ev = LfdEvaluator(unr.model)
    bad = []
    for s in unr.roots:
        for i, f in enumerate(cl.formulas):
            if lfd.e_depth(f) < unr.depth and ev.holds(s, f) != unr.types[s].has(i):
                bad.append((s, f))
    return bad


# from standard models over the expanded signature


def type_of(M_hat, s, psi: lfd.Formula, sig: Signature) -> Type:
    """The closure formulas whose bullet translation holds at s."""
    from .mcheck import eval_fo
    from .translate import team_atom, tr_bullet

    cl = closure_table(psi, sig)
    s = dict(zip(sig.lfd_vars, s)) if not isinstance(s, dict) else dict(s)
    if not eval_fo(M_hat, s, team_atom(sig)):
        raise PreconditionError(f"{s} is not an A-tuple")
    bits = 0
    for i, f in enumerate(cl.formulas):
        if eval_fo(M_hat, s, tr_bullet(f, sig)):
            bits |= 1 << i
    return Type(bits, cl)


def build_type_model(M_hat, psi: lfd.Formula, sig: Signature, check_setup: bool = True) -> TypeModel:
    from .mcheck import eval_fo
    from .syntax.signature import TEAM_RELATION
    from .translate import setup

    cl = closure_table(psi, sig)
    if check_setup and not eval_fo(M_hat, {}, setup(psi, sig)):
        raise PreconditionError("the model does not satisfy setup(psi)")
    tuples = sorted(M_hat.relations.get(TEAM_RELATION, ()))
    if not tuples:
        raise PreconditionError("the model has no A-tuples")
    return TypeModel(tuple(type_of(M_hat, t, psi, sig) for t in tuples), cl)


def H(M_hat, s, psi: lfd.Formula, sig: Signature, depth: int | None = None):
    """Dependence model and assignment realising the type of s in M_hat.

    Only the types reachable from s's type are unravelled: the types of all
    A-tuples need not fit in one dependence model.
    """
    tm = build_type_model(M_hat, psi, sig)
    root = type_of(M_hat, s, psi, sig)
    reach = _reachable(tm, root)
    unr = unravel(reach, depth, roots=[root])
    return unr.model, unr.roots[0]


def _reachable(tm: TypeModel, root: Type) -> TypeModel:
    cl = tm.closure
    chosen = {root.bits: root}
    todo = [root]
    while todo:
        t = todo.pop()
        for i, vm, body in cl.exists:
            if t.has(i) and not t.has(body):
                w = _find_witness(cl, t, vm, body, tm.types)
                if w is not None and w.bits not in chosen:
                    chosen[w.bits] = w
                    todo.append(w)
    return TypeModel(tuple(chosen.values()), cl)
