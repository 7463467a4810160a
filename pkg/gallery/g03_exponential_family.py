"""
The family lam * exp(x)
=======================

A custom expression behaves like a built-in family.  At lam = 1/e the
line y = x touches the graph at x = 1; at lam = -e the fixed point -1
has multiplier -1.
"""
import math

from bifdim import MapSystem, check_bifurcation_conditions, classify_fixed_point, parse
from bifdim import predict_and_measure

f = parse("lam*exp(x)")
print(f.render())

for lam0, x0 in ((math.exp(-1), 1.0), (-math.e, -1.0)):
    report = check_bifurcation_conditions(f, lam0, x0)
    print(f"\nlam0={lam0:.6f}  x0={x0}  verdict: {report.verdict}")
    for cond in report.conditions:
        print(f"  {cond.name:18s} {cond.value: .6e}  {cond.requirement:8s} {cond.satisfied}")

###############################################################################
# The saddle-node side gives dimension 1/2, the flip side 2/3.

for lam0, x0, x1 in ((math.exp(-1), 1.0, 0.95), (-math.e, -1.0, -0.95)):
    system = MapSystem.custom(f, lam0)
    c = classify_fixed_point(system, x0)
    m = predict_and_measure(system, x0, x1, 10**6)
    print(f"lam0={lam0:.6f}  {c.kind}  predicted {c.predicted_dim}  measured {m.sausage.d:.4f}")
