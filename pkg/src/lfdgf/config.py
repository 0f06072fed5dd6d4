"""Resource caps.

Defaults can be overridden through the ``LFDGF_CAPS`` environment variable,
e.g. ``LFDGF_CAPS="closure=96,tau_nodes=500000"``.
"""
from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Caps:
    closure: int = 64          # |Cl(psi)|; 64 keeps a type in one uint64
    full_team: int = 4096      # |domain|^k for full dependence models
    tau_nodes: int = 200_000   # distinct nodes in a tau output DAG
    types: int = 2_000_000     # candidate types during enumeration
    nodes: int = 200_000       # team size of an unravelled model

    def updated(self, **kw) -> "Caps":
        return replace(self, **{k: int(v) for k, v in kw.items()})


def parse_caps(text: str) -> dict:
    out = {}
    names = {f.name for f in fields(Caps)}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in names:
            raise ValueError(f"unknown cap {key!r}")
        out[key] = int(float(value))
    return out


def default_caps() -> Caps:
    env = os.environ.get("LFDGF_CAPS")
    if env:
        return Caps().updated(**parse_caps(env))
    return Caps()


CAPS = default_caps()


@contextmanager
def caps(**kw):
    """Temporarily override some caps."""
    global CAPS
    saved = CAPS
    CAPS = CAPS.updated(**kw)
    try:
        yield CAPS
    finally:
        CAPS = saved
