"""Command-line entry point.

Every command prints one JSON document on stdout. Exit codes: 0 success,
1 semantic negative (false, UNSAT, nothing found, not bisimilar, suite
failure), 2 usage or input error, 3 resource cap.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import config, io
from .errors import LfdGfError, SizeCapError
from .syntax import fo, fo_to_text, lfd, lfd_to_text, parse_fo, parse_lfd
from .syntax.signature import Signature

OK, NEGATIVE, USAGE, CAP = 0, 1, 2, 3

FO_SUFFIXES = {".gf", ".fo"}


class UsageError(Exception):
    pass


# inputs


def _read_formula_text(args) -> str:
    if getattr(args, "formula", None):
        return args.formula
    if getattr(args, "file", None):
        return Path(args.file).read_text()
    raise UsageError("give a formula with -f FILE or -e TEXT")


def _logic(args) -> str:
    if getattr(args, "logic", None):
        return args.logic
    f = getattr(args, "file", None)
    return "fo" if f and Path(f).suffix in FO_SUFFIXES else "lfd"


def _lfd_vars(f: lfd.Formula) -> list[str]:
    out = set()
    for g in lfd.subformulas(f):
        if isinstance(g, lfd.Atom):
            out.update(g.args)
        elif isinstance(g, lfd.Dep):
            out.update(g.vars | {g.target})
        elif isinstance(g, lfd.E):
            out.update(g.vars)
    return sorted(out)


def signature_for(f: lfd.Formula, vars_=None) -> Signature:
    """Relations as used in f; LFD variables from ``vars_`` or else those of f."""
    rels = {g.pred: len(g.args) for g in lfd.subformulas(f) if isinstance(g, lfd.Atom)}
    return Signature(rels, tuple(vars_ or _lfd_vars(f) or ["x"]))


def load_lfd(args) -> tuple[lfd.Formula, Signature]:
    f = parse_lfd(_read_formula_text(args))
    sig = signature_for(f, args.vars)
    lfd.check(f, sig)
    return f, sig


def load_fo(args) -> fo.Formula:
    return parse_fo(_read_formula_text(args), equality=args.eq)


def _assignment(args, model=None):
    if not args.assignment:
        return None
    text = args.assignment
    data = json.loads(Path(text).read_text()) if Path(text).is_file() else json.loads(text)
    if isinstance(data, list):
        if model is None:
            raise UsageError("a list assignment needs a dependence model")
        return dict(zip(model.vars, data))
    return data


def _gf_vars(phi: fo.Formula, args, at_least: int) -> tuple:
    if args.vars:
        return tuple(args.vars)
    k = max(at_least, 1)
    return tuple(f"v{i + 1}" for i in range(k))


# commands


def cmd_parse(args):
    if _logic(args) == "fo":
        f = load_fo(args)
        return OK, {"logic": "fo", "text": fo_to_text(f), "size": fo.size(f),
                    "free": sorted(fo.free_vars(f)), "guardedness": fo.is_guarded(f, args.eq).value}
    f, sig = load_lfd(args)
    return OK, {"logic": "lfd", "text": lfd_to_text(f, sig), "size": lfd.size(f), "e_depth": lfd.e_depth(f),
                "free": list(sig.ordered(lfd.free_vars(f))), "vars": list(sig.lfd_vars),
                "relations": dict(sorted(sig.relations.items()))}


def cmd_check(args):
    from .mcheck import LfdEvaluator, eval_fo

    model = io.load_model(args.model)
    if _logic(args) == "fo":
        f = load_fo(args)
        if hasattr(model, "team"):
            model = model.base
        s = _assignment(args) or {}
        return _truth(eval_fo(model, s, f))
    if not hasattr(model, "team"):
        raise UsageError("LFD formulas are checked on dependence models (JSON with 'vars' and 'team')")
    f = parse_lfd(_read_formula_text(args))
    sig = Signature(dict(model.base.arities), model.vars)
    lfd.check(f, sig)
    s = _assignment(args, model)
    if s is None:
        raise UsageError("check needs --assignment")
    s = model.assignment(s)
    ev = LfdEvaluator(model)
    truth = ev.holds(s, f)
    out = {"truth": truth}
    if args.trace:
        subs = sorted(lfd.subformulas(f), key=lambda g: lfd.sort_key(g, sig))
        out["trace"] = [{"formula": lfd_to_text(g, sig), "truth": ev.holds(s, g)} for g in subs]
    return (OK if truth else NEGATIVE), out


def _truth(t: bool):
    return (OK if t else NEGATIVE), {"truth": t}


def _rho_text(rho: dict) -> str:
    return ",".join(f"{x}={v}" for x, v in sorted(rho.items()))


def _parse_rho(text: str) -> dict:
    out = {}
    for item in text.split(","):
        x, sep, v = item.partition("=")
        if not sep:
            raise UsageError(f"bad --rho item {item!r}; expected x=v")
        out[x.strip()] = v.strip()
    return out


def cmd_translate(args):
    from . import translate as T

    if args.dir == "gf2lfd":
        phi = load_fo(args)
        need = max(fo.relations_used(phi).values(), default=1)
        sig = Signature(fo.relations_used(phi), _gf_vars(phi, args, need))
        if args.all_rho:
            pairs = T.tau_all(phi, sig, args.eq)
        elif args.rho:
            pairs = [(_parse_rho(args.rho), T.tau(phi, _parse_rho(args.rho), sig, args.eq))]
        else:
            raise UsageError("gf2lfd needs --rho x=v1,... or --all-rho")
        items = []
        for i, (rho, g) in enumerate(pairs):
            item = {"rho": _rho_text(rho), "formula": lfd_to_text(g, sig)}
            if args.out:
                path = Path(args.out) / f"{_stem(args)}.{i}.lfd"
                path.parent.mkdir(parents=True, exist_ok=True)
                path.write_text(item["formula"] + "\n")
                item["file"] = str(path)
            items.append(item)
        return OK, {"dir": "gf2lfd", "vars": list(sig.lfd_vars), "translations": items}

    psi, sig = load_lfd(args)
    if args.dir == "lfd2fo":
        out = fo.And(T.tr(psi, sig), T.team_atom(sig))
    elif args.dir == "lfd2gf":
        out = T.tr_bullet(psi, sig)
    elif args.dir == "setup":
        out = T.setup(psi, sig)
    else:
        out = T.sigma(psi, sig)
    text = fo_to_text(out)
    result = {"dir": args.dir, "formula": text, "size": fo.dag_size(out)}
    if args.dir in ("setup", "sigma"):
        result["setup_counts"] = {k: len(v) for k, v in T.setup_parts(psi, sig).items()}
    if args.out:
        path = Path(args.out)
        path.write_text(text + "\n")
        result["file"] = str(path)
    return OK, result


def _stem(args) -> str:
    return Path(args.file).stem if getattr(args, "file", None) else "formula"


def cmd_sat(args):
    psi, sig = load_lfd(args)
    if args.engine == "typemodel":
        from .typemodel import sat_lfd, unravel

        r = sat_lfd(psi, sig)
        out = {"engine": "typemodel", "verdict": "SAT" if r.sat else "UNSAT", "stats": r.stats}
        if r.sat and args.cert:
            cert = r.model.to_json()
            if args.depth is not None:
                root = [t for t in r.model if t.has(r.model.closure.psi_index)][:1]
                unr = unravel(r.model, args.depth, roots=root)
                cert["unravelled"] = io.model_to_json(unr.model)
                cert["assignment"] = list(unr.roots[0])
            _write(args.cert, cert)
            out["cert"] = args.cert
        return (OK if r.sat else NEGATIVE), out
    if args.engine == "bruteforce":
        from .oracle import brute_sat_lfd

        hit = brute_sat_lfd(psi, sig, args.max_dom, args.max_team)
        out = {"engine": "bruteforce", "verdict": "SAT" if hit else "NONE_FOUND",
               "bounds": {"max_dom": args.max_dom, "max_team": args.max_team}}
        if hit and args.cert:
            data = io.model_to_json(hit.model)
            data["assignment"] = list(hit.assignment)
            _write(args.cert, data)
            out["cert"] = args.cert
        return (OK if hit else NEGATIVE), out
    from .oracle import brute_sat_gf
    from .translate import sigma

    hit = brute_sat_gf(sigma(psi, sig), args.max_dom, arities=sig.hat_relations())
    out = {"engine": "via-gf", "verdict": "SAT" if hit else "NONE_FOUND", "bounds": {"max_dom": args.max_dom}}
    if hit and args.cert:
        data = io.model_to_json(hit.model)
        data["assignment"] = hit.assignment
        _write(args.cert, data)
        out["cert"] = args.cert
    return (OK if hit else NEGATIVE), out


def _write(path, data):
    Path(path).write_text(io.dumps(data, pretty=True) + "\n")


def cmd_transform(args):
    from . import models as M

    model = io.load_model(args.model)
    op = args.op
    dep = hasattr(model, "team")
    if op in ("Tinv", "G", "distinguish", "expand-hat") and not dep:
        raise UsageError(f"{op} needs a dependence model")
    if op in ("T", "F", "lift") and dep:
        raise UsageError(f"{op} needs a standard model")
    vars_ = tuple(args.vars) if args.vars else None
    out: dict = {"op": op}
    if op == "T":
        out["model"] = io.model_to_json(M.from_standard_T(model, _need_vars(vars_, op)))
    elif op == "Tinv":
        out["model"] = io.model_to_json(M.to_standard_Tinv(model))
    elif op == "F":
        out["model"] = io.model_to_json(M.full_F(model, _need_vars(vars_, op)))
    elif op == "G":
        out["model"] = io.model_to_json(M.drop_unnamed_G(model))
    elif op == "distinguish":
        md, Z = M.distinguish(model)
        out["model"] = io.model_to_json(md)
        out["relation"] = [[list(s), list(t)] for s, t in Z]
    elif op == "lift":
        s = _assignment(args) or {}
        md, rho, t = M.lift_distinguished(model, s, _need_vars(vars_, op))
        out.update(model=io.model_to_json(md), rho=rho, assignment=list(t))
    else:
        psi = parse_lfd(_read_formula_text(args)) if (args.formula or args.file) else None
        out["model"] = io.model_to_json(M.expand_hat(model, psi))
    if args.out:
        _write(args.out, out["model"])
        out["file"] = args.out
    return OK, out


def _need_vars(vars_, op):
    if not vars_:
        raise UsageError(f"{op} needs --vars")
    return vars_


def cmd_bisim(args):
    from .mcheck import check_dep_bisim, greatest_dep_bisim

    m1, m2 = io.load_model(args.left), io.load_model(args.right)
    if not (hasattr(m1, "team") and hasattr(m2, "team")):
        raise UsageError("bisim compares two dependence models")
    if args.relation:
        Z = json.loads(Path(args.relation).read_text())
        v = check_dep_bisim(m1, m2, [(tuple(a), tuple(b)) for a, b in Z])
        return (OK if v.ok else NEGATIVE), {"bisimilar": v.ok, "verdict": v.to_json()}
    Z = greatest_dep_bisim(m1, m2)
    if Z is None:
        return NEGATIVE, {"bisimilar": False}
    return OK, {"bisimilar": True, "relation": [[list(a), list(b)] for a, b in sorted(Z)]}


def cmd_roundtrip(args):
    from .suites import SUITES, run_suite

    names = list(SUITES) if args.suite == "all" else [args.suite]
    for name in names:
        if name not in SUITES:
            raise UsageError(f"unknown suite {name!r}; choose from all, {', '.join(SUITES)}")
    results = [run_suite(name, args.seed, args.n) for name in names]
    if args.pretty:
        for r in results:
            print(r.line(), file=sys.stderr)
    ok = all(r.passed for r in results)
    return (OK if ok else NEGATIVE), {"seed": args.seed, "passed": ok, "suites": [r.to_json() for r in results]}


def cmd_oracle(args):
    from .oracle import brute_sat_gf, brute_sat_lfd, random_corpus

    if args.task == "sat-lfd":
        psi, sig = load_lfd(args)
        hit = brute_sat_lfd(psi, sig, args.max_dom, args.max_team)
        if hit is None:
            return NEGATIVE, {"found": False, "bounds": {"max_dom": args.max_dom, "max_team": args.max_team}}
        return OK, {"found": True, "model": io.model_to_json(hit.model), "assignment": list(hit.assignment)}
    if args.task == "sat-gf":
        phi = load_fo(args)
        hit = brute_sat_gf(phi, args.max_dom)
        if hit is None:
            return NEGATIVE, {"found": False, "bounds": {"max_dom": args.max_dom}}
        return OK, {"found": True, "model": io.model_to_json(hit.model), "assignment": hit.assignment}
    # corpus
    if not args.out:
        raise UsageError("corpus needs --out DIR")
    sig = Signature({"P": 1, "Q": 2}, tuple(args.vars or ("x", "y")))
    items = random_corpus(args.seed, args.kind, args.count, sig)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for i, item in enumerate(items):
        if args.kind == "lfd":
            name, text = f"{i:04d}.lfd", lfd_to_text(item, sig) + "\n"
        elif args.kind == "gf":
            name, text = f"{i:04d}.gf", fo_to_text(item) + "\n"
        else:
            name, text = f"{i:04d}.json", io.dumps(io.model_to_json(item), pretty=True) + "\n"
        (out / name).write_text(text)
        files.append(name)
    manifest = {"seed": args.seed, "kind": args.kind, "count": args.count, "vars": list(sig.lfd_vars),
                "relations": sig.relations, "files": files}
    _write(out / "manifest.json", manifest)
    return OK, {"dir": str(out), "manifest": str(out / "manifest.json"), "count": len(files)}


# argument parsing


def _add_formula(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("-f", "--file", help="formula file")
    g.add_argument("-e", "--formula", help="formula text")
    p.add_argument("--logic", choices=["lfd", "fo"], help="default: fo for .gf/.fo files, else lfd")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--vars", type=lambda s: [v for v in s.split(",") if v], help="LFD variables, e.g. x,y,z")
    common.add_argument("--eq", action="store_true", default=None, help="equality mode")
    common.add_argument("--pretty", action="store_true", default=None, help="indented output")
    common.add_argument("--config", help="TOML file with defaults (vars, eq, pretty, seed, [caps])")

    p = argparse.ArgumentParser(prog="lfdgf", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("parse", parents=[common], help="parse and normalise a formula")
    _add_formula(s)

    s = sub.add_parser("check", parents=[common], help="model-check a formula at an assignment")
    _add_formula(s)
    s.add_argument("--model", required=True)
    s.add_argument("--assignment", help="JSON file or literal: {\"x\": \"a\"} or [\"a\", ...]")
    s.add_argument("--trace", action="store_true", help="truth of every subformula")

    s = sub.add_parser("translate", parents=[common], help="translate between LFD and GF")
    _add_formula(s)
    s.add_argument("--dir", required=True, choices=["lfd2fo", "lfd2gf", "setup", "sigma", "gf2lfd"])
    s.add_argument("--rho", help="x=v1,y=v2")
    s.add_argument("--all-rho", action="store_true")
    s.add_argument("--out", help="output file, or directory for gf2lfd")

    s = sub.add_parser("sat", parents=[common], help="decide or search satisfiability of an LFD formula")
    _add_formula(s)
    s.add_argument("--engine", choices=["typemodel", "bruteforce", "via-gf"], default="typemodel")
    s.add_argument("--cert", help="write the certificate or model here")
    s.add_argument("--depth", type=int, help="unravel the certificate to this depth")
    s.add_argument("--max-dom", type=int, default=3)
    s.add_argument("--max-team", type=int, default=4)

    s = sub.add_parser("transform", parents=[common], help="model transformations")
    s.add_argument("op", choices=["T", "Tinv", "F", "G", "distinguish", "lift", "expand-hat"])
    s.add_argument("--model", required=True)
    s.add_argument("--assignment", help="for lift")
    _add_formula(s, required=False)
    s.add_argument("--out")

    s = sub.add_parser("bisim", parents=[common], help="dependence bisimulation between two models")
    s.add_argument("left")
    s.add_argument("right")
    s.add_argument("--relation", help="check this relation instead of computing the greatest one")

    s = sub.add_parser("roundtrip", parents=[common], help="run a property suite")
    s.add_argument("--suite", default="all")
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--n", type=int, help="random instances (default per suite)")

    s = sub.add_parser("oracle", parents=[common], help="bounded search and corpus generation")
    s.add_argument("task", choices=["sat-lfd", "sat-gf", "corpus"])
    _add_formula(s, required=False)
    s.add_argument("--max-dom", type=int, default=3)
    s.add_argument("--max-team", type=int, default=4)
    s.add_argument("--kind", choices=["lfd", "gf", "model", "distinguished"], default="lfd")
    s.add_argument("--count", type=int, default=20)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--out")
    return p


COMMANDS = {"parse": cmd_parse, "check": cmd_check, "translate": cmd_translate, "sat": cmd_sat,
            "transform": cmd_transform, "bisim": cmd_bisim, "roundtrip": cmd_roundtrip, "oracle": cmd_oracle}


def _load_config(path: str) -> dict:
    try:
        import tomllib
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _apply_config(args) -> dict:
    """Fill unset flags from --config; returns cap overrides."""
    data = _load_config(args.config) if args.config else {}
    if args.vars is None and "vars" in data:
        v = data["vars"]
        args.vars = v.split(",") if isinstance(v, str) else list(v)
    for key in ("eq", "pretty"):
        if getattr(args, key) is None:
            setattr(args, key, bool(data.get(key, False)))
    if hasattr(args, "seed") and args.seed is None:
        args.seed = int(data.get("seed", 0))
    caps = data.get("caps", {})
    env = os.environ.get("LFDGF_CAPS")
    if env:
        caps = {**caps, **config.parse_caps(env)}
    return caps


def _execute(argv):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return (USAGE if e.code else OK), {"error": "usage"}, False
    try:
        caps = _apply_config(args)
        with config.caps(**caps):
            code, out = COMMANDS[args.command](args)
        return code, out, args.pretty
    except SizeCapError as e:
        return CAP, {"error": "cap", "message": str(e)}, False
    except (UsageError, LfdGfError, OSError, ValueError, KeyError) as e:
        return USAGE, {"error": type(e).__name__, "message": str(e)}, False


def run(argv=None) -> tuple[int, dict]:
    """Parse argv, run the command, and return (exit code, JSON-able result)."""
    code, out, _ = _execute(argv)
    return code, out


def main(argv=None) -> int:
    code, out, pretty = _execute(argv)
    print(io.dumps(out, pretty=pretty))
    return code


if __name__ == "__main__":
    sys.exit(main())
