"""Dependence models: teams, dependence atoms, and distinguished copies.

Run with ``python demos/01_dependence_models.py``.
"""
from lfdgf import parse_lfd
from lfdgf.mcheck import dep_closure, eval_lfd, greatest_dep_bisim
from lfdgf.models import DependenceModel, StandardModel, distinguish, is_distinguished

# A model over {a, b} where P holds of a. The team lists the admissible
# assignments to (x, y); leaving (b, a) out makes y depend on x.
base = StandardModel.build(["a", "b"], {"P": [("a",)]})
team = [("a", "a"), ("a", "b"), ("b", "b")]
model = DependenceModel(base, ("x", "y"), team)

for text in ["D[x] y", "D[y] x", "E[] P(y)", "E[y] P(x)"]:
    f = parse_lfd(text)
    print(f"{text:10s}", [eval_lfd(model, s, f) for s in model.team])

# which variables does {y} determine, assignment by assignment
for s in model.team:
    print(s, "determined by y:", sorted(dep_closure(model, s, {"y"})))

# Tag each value with the variable carrying it. The result is distinguished,
# and the pairing with the original team is a dependence bisimulation.
tagged, pairing = distinguish(model)
print("distinguished:", is_distinguished(model), "->", is_distinguished(tagged))
print("pairing:", pairing)
print("greatest bisimulation is total:", greatest_dep_bisim(model, tagged) is not None)
