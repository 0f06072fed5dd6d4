"""Deciding LFD satisfiability with types, and turning certificates into models.

Run with ``python demos/02_type_elimination.py``.
"""
from lfdgf import Signature, parse_lfd
from lfdgf.mcheck import eval_lfd
from lfdgf.syntax import lfd_to_text
from lfdgf.typemodel import enumerate_types, literal_truth_lemma, sat_lfd, truth_report, unravel

S1 = Signature({"P": 1}, ("x",))
S2 = Signature({"P": 1, "Q": 2}, ("x", "y"))

# P(x) over one variable: P is free, D[] x is free, D[x] x is forced.
types = enumerate_types(parse_lfd("P(x)"), S1)
print(len(types), "types for P(x)")

# Two contradictions and one satisfiable formula.
for text in ["E[] P(x) & ~E[] P(x)", "D[] x & E[] P(x) & E[] ~P(x)", "E[] P(x) & E[] ~P(x)"]:
    r = sat_lfd(parse_lfd(text), S1)
    print(f"{text:32s}", "SAT" if r.sat else "UNSAT", r.stats)

# A satisfiable formula with a failing dependence, certified and unravelled.
psi = parse_lfd("E[x] (P(y) & ~D[x] y) & E[x] ~P(y)")
cert = sat_lfd(psi, S2).model
print("certificate with", len(cert), "types")
root = [t for t in cert if psi in t]
unr = unravel(cert, roots=root[:1])
s = unr.roots[0]
print("team size", len(unr.model.team), "root", s, "psi holds:", eval_lfd(unr.model, s, psi))
report = truth_report(unr)
print({key: len(v) if isinstance(v, list) else v for key, v in report.items()})

# Universal demands reach the leaves of any finite truncation. Here the root
# type is right about psi, but the truncated model is not; the truth budget
# says so up front instead of promising agreement by E-depth alone.
psi = parse_lfd("~E[] ~(E[x] P(y) & E[x] ~P(y)) & ~E[] ~E[y] ~D[] x")
cert = sat_lfd(psi, S2).model
root = [t for t in cert if psi in t][:1]
unr = unravel(cert, 3, roots=root)
s = unr.roots[0]
print(lfd_to_text(psi, S2))
print("  psi in the root type:", psi in unr.types[s], "psi true at the root:", eval_lfd(unr.model, s, psi))
print("  literal misses at the root:", len(literal_truth_lemma(unr)))
print("  psi guaranteed by the budget:", unr.guaranteed(cert.closure.psi_index, s))
print("  budget failures:", len(truth_report(unr)["budget_failures"]))
