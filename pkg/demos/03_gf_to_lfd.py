"""From guarded first-order sentences to LFD, and back to satisfiability.

Run with ``python demos/03_gf_to_lfd.py``.
"""
from lfdgf import Signature, parse_fo
from lfdgf.oracle import brute_sat_gf
from lfdgf.syntax import lfd_to_text
from lfdgf.translate import tau, tau_all
from lfdgf.typemodel import sat_lfd

V2 = Signature({"P": 1, "Q": 2}, ("v1", "v2"))

# A first-order contradiction in the guarded fragment. Its translation
# spells out each way of placing x and y on the two LFD variables.
phi = parse_fo("exists x . P(x) & ~exists y . P(y)")
f = tau(phi, {}, V2)
print(lfd_to_text(f, V2))
print("LFD verdict:", "SAT" if sat_lfd(f, V2).sat else "UNSAT")
print("bounded GF search:", brute_sat_gf(phi, 3))

# A formula with free variables has one translation per map rho.
phi = parse_fo("Q(x,y) & exists z . (Q(y,z) & ~P(z))")
for rho, g in tau_all(phi, V2):
    verdict = "SAT" if sat_lfd(g, V2).sat else "UNSAT"
    print(rho, verdict, lfd_to_text(g, V2)[:70])
hit = brute_sat_gf(phi, 3)
print("finite model:", hit.model.domain, dict(hit.model.relations), hit.assignment)
