"""JSON encodings of models. Keys and tuples are emitted in sorted order."""
from __future__ import annotations

import json
from typing import Any

from .errors import SignatureError
from .models import DependenceModel, StandardModel


def standard_to_json(M: StandardModel) -> dict:
    return {
        "domain": list(M.domain),
        "relations": {name: {"arity": M.arities[name], "tuples": sorted(list(t) for t in M.relations[name])}
                      for name in sorted(M.arities)},
    }


def standard_from_json(data: dict) -> StandardModel:
    try:
        rels = {name: [tuple(t) for t in r["tuples"]] for name, r in data["relations"].items()}
        arities = {name: int(r["arity"]) for name, r in data["relations"].items()}
        return StandardModel(tuple(data["domain"]), rels, arities)
    except (KeyError, TypeError) as e:
        raise SignatureError(f"malformed model: {e}") from None


def dependence_to_json(model: DependenceModel) -> dict:
    out = standard_to_json(model.base)
    out["vars"] = list(model.vars)
    out["team"] = [list(s) for s in model.team]
    return out


def dependence_from_json(data: dict) -> DependenceModel:
    if "vars" not in data or "team" not in data:
        raise SignatureError("a dependence model needs 'vars' and 'team'")
    return DependenceModel(standard_from_json(data), tuple(data["vars"]), tuple(tuple(s) for s in data["team"]))


def model_to_json(model) -> dict:
    return dependence_to_json(model) if isinstance(model, DependenceModel) else standard_to_json(model)


def model_from_json(data: dict):
    return dependence_from_json(data) if "team" in data else standard_from_json(data)


def dumps(obj: Any, pretty: bool = False) -> str:
    return json.dumps(obj, indent=2 if pretty else None, sort_keys=True)


def load_model(path: str):
    with open(path) as fh:
        return model_from_json(json.load(fh))
