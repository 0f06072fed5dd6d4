"""The guarded translation sigma and the size of its setup part.

Run with ``python demos/04_sigma_and_setup.py``.
"""
import random

from lfdgf import Signature, parse_lfd
from lfdgf.mcheck import eval_fo, eval_lfd
from lfdgf.models import expand_hat
from lfdgf.oracle import random_dependence_model
from lfdgf.suites import SIGMA_SIZE_CONSTANT, non_decomposable_count, sigma_ratio
from lfdgf.syntax import fo, fo_to_text
from lfdgf.translate import setup_parts, sigma, tr_bullet

S2 = Signature({"P": 1, "Q": 2}, ("x", "y"))
psi = parse_lfd("E[x] (P(y) & ~D[x] y)")

# Dependence atoms become atoms of fresh relations named after (V, U).
print(fo_to_text(tr_bullet(psi, S2)))

# setup has three families; their sizes depend only on k and the closure.
parts = setup_parts(psi, S2)
print({name: len(v) for name, v in parts.items()}, "non-decomposable:", non_decomposable_count(psi, S2))

# sigma is guarded, and every dependence model expands to a model of it
# wherever psi holds.
s_formula = sigma(psi, S2)
print("guarded:", fo.is_guarded(s_formula).is_gf, "nodes:", fo.dag_size(s_formula))
rng = random.Random(4)
agree = 0
for _ in range(50):
    m = random_dependence_model(rng, S2)
    hat = expand_hat(m, psi)
    agree += all(eval_fo(hat, m.as_dict(s), s_formula) == eval_lfd(m, s, psi) for s in m.team)
print(agree, "of 50 random models agree")

print("size ratio", round(sigma_ratio(psi, S2), 2), "<= c =", SIGMA_SIZE_CONSTANT)
