"""
Logistic map at its first bifurcations
======================================

At a bifurcation parameter the fixed point loses hyperbolicity and
orbits creep toward it at a polynomial rate.  The set of orbit points
then has a nonzero box dimension, fixed by the order of tangency.
"""
import math

from bifdim import MapSystem, classify_fixed_point, find_cycles, predict_and_measure

N = 10**6

###############################################################################
# Classification needs only the jet of F at the fixed point.

for lam, x0 in ((1.0, 0.0), (2.5, 0.6), (3.0, 2 / 3)):
    c = classify_fixed_point(MapSystem.logistic(lam), x0)
    print(f"lam={lam}  x0={x0:.4f}  {c.kind:20s} dim={c.predicted_dim}  beta={c.predicted_beta}")

###############################################################################
# Predictions next to measurements.  The orbit is split into residue
# classes that approach the target monotonically.

cases = [
    ("lam=1", MapSystem.logistic(1.0), 0.0, 0.05),
    ("lam=3", MapSystem.logistic(3.0), 2 / 3, 0.5),
]
lam = 1 + math.sqrt(6)
cases.append(("lam=1+sqrt6", MapSystem.logistic(lam), find_cycles(MapSystem.logistic(lam), 2, 0, 1)[0], 0.5))

for name, system, target, x1 in cases:
    m = predict_and_measure(system, target, x1, N)
    print(f"{name:12s} predicted d={float(m.predicted_dim):.4f} beta={float(m.predicted_beta):.4f}"
          f"  measured d={m.sausage.d:.4f} tricot={m.tricot.d:.4f} beta={m.decay.beta:.4f}")

###############################################################################
# The period-3 window opens with a saddle-node of F^3, so each cycle
# point is a tangent fixed point of the third iterate.

lam = 1 + math.sqrt(8)
cycle = find_cycles(MapSystem.logistic(lam), 3, 0, 1)[0]
f3 = MapSystem.logistic(lam).with_power(3)
for p in cycle.points:
    print(p, classify_fixed_point(f3, p).kind)
a1 = cycle.points[0]
m = predict_and_measure(f3, a1, a1 - 0.005, N)
print(f"F^3 orbit: d={m.sausage.d:.4f}  beta={m.decay.beta:.4f}")
