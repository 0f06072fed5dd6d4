from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping

from ..errors import SignatureError

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
TEAM_RELATION = "A"


@dataclass(frozen=True)
class Signature:
    """Base relations with arities plus the ordered list of LFD variables.

    The variable order is canonical: every set of variables is enumerated in
    this order, and variable ``i`` is bit ``i`` of a variable-set mask.
    """

    relations: Mapping[str, int]
    lfd_vars: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rels = dict(self.relations)
        lfd_vars = tuple(self.lfd_vars)
        if not lfd_vars:
            raise SignatureError("lfd_vars must be nonempty")
        if len(set(lfd_vars)) != len(lfd_vars):
            raise SignatureError(f"duplicate LFD variables in {lfd_vars}")
        for v in lfd_vars:
            if not _IDENT.match(v):
                raise SignatureError(f"bad variable name {v!r}")
        for name, arity in rels.items():
            if not _IDENT.match(name):
                raise SignatureError(f"bad relation name {name!r}")
            if name == TEAM_RELATION or name.startswith("R_"):
                raise SignatureError(f"relation name {name!r} is reserved for the expanded signature")
            if not isinstance(arity, int) or arity < 1:
                raise SignatureError(f"relation {name} needs a positive arity, got {arity!r}")
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "lfd_vars", lfd_vars)
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(lfd_vars)})

    def __hash__(self):
        return hash((tuple(sorted(self.relations.items())), self.lfd_vars))

    @property
    def k(self) -> int:
        return len(self.lfd_vars)

    @property
    def max_arity(self) -> int:
        return max(self.relations.values(), default=0)

    def index(self, v: str) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise SignatureError(f"{v!r} is not an LFD variable (have {', '.join(self.lfd_vars)})") from None

    def ordered(self, vs: Iterable[str]) -> tuple[str, ...]:
        return tuple(sorted(set(vs), key=self.index))

    def mask(self, vs: Iterable[str]) -> int:
        m = 0
        for v in vs:
            m |= 1 << self.index(v)
        return m

    def unmask(self, m: int) -> frozenset[str]:
        return frozenset(v for i, v in enumerate(self.lfd_vars) if m >> i & 1)

    def subsets(self) -> list[frozenset[str]]:
        """All subsets of the LFD variables, ordered by mask."""
        return [self.unmask(m) for m in range(1 << self.k)]

    def arity(self, name: str) -> int:
        if name in self.relations:
            return self.relations[name]
        hat = self.hat_relations()
        if name in hat:
            return hat[name]
        raise SignatureError(f"unknown relation {name!r}")

    # expanded signature

    def dep_relation(self, V: Iterable[str], U: Iterable[str]) -> str:
        return dep_relation_name(V, U, self.lfd_vars)

    def parse_dep_relation(self, name: str) -> tuple[frozenset[str], frozenset[str]] | None:
        m = re.fullmatch(r"R_\{([^}]*)\}_\{([^}]*)\}", name)
        if not m:
            return None
        V = frozenset(filter(None, m.group(1).split(",")))
        U = frozenset(filter(None, m.group(2).split(",")))
        for v in V | U:
            self.index(v)
        return V, U

    def hat_relations(self) -> dict[str, int]:
        cache = self.__dict__.get("_hat")
        if cache is None:
            cache = dict(self.relations)
            cache[TEAM_RELATION] = self.k
            for V, U in product(self.subsets(), repeat=2):
                cache[self.dep_relation(V, U)] = len(V)
            object.__setattr__(self, "_hat", cache)
        return cache

    def with_relations(self, extra: Mapping[str, int]) -> "Signature":
        rels = dict(self.relations)
        rels.update(extra)
        return Signature(rels, self.lfd_vars)


def dep_relation_name(V: Iterable[str], U: Iterable[str], order: tuple[str, ...]) -> str:
    """Name of the expanded-signature relation standing for ``D_V U``."""
    V, U = set(V), set(U)
    return "R_{%s}_{%s}" % (",".join(v for v in order if v in V), ",".join(u for u in order if u in U))


def parse_signature(text: str) -> Signature:
    """Read ``rel P 2`` / ``vars x y z`` lines (``#`` starts a comment)."""
    rels: dict[str, int] = {}
    lfd_vars: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "rel" and len(parts) == 3:
            if parts[1] in rels:
                raise SignatureError(f"line {lineno}: duplicate relation {parts[1]}")
            try:
                rels[parts[1]] = int(parts[2])
            except ValueError:
                raise SignatureError(f"line {lineno}: bad arity {parts[2]!r}") from None
        elif parts[0] == "vars":
            lfd_vars.extend(parts[1:])
        else:
            raise SignatureError(f"line {lineno}: cannot parse {raw!r}")
    return Signature(rels, tuple(lfd_vars))


def format_signature(sig: Signature) -> str:
    lines = [f"rel {name} {arity}" for name, arity in sorted(sig.relations.items())]
    lines.append("vars " + " ".join(sig.lfd_vars))
    return "\n".join(lines) + "\n"
