"""
Sausage measure of a sequence
=============================

A point set is fattened by radius eps and the length of the union is
recorded.  For a sequence that accumulates at a point, that length
shrinks like eps^(1 - d), and d is the box dimension.
"""
import numpy as np

from bifdim import PointSet, dim_sausage, dim_tricot, sausage_measure

###############################################################################
# Two points, at two radii.  Below half the gap the intervals are disjoint.

s = PointSet([0.0, 1.0])
print(sausage_measure(s, 0.25), sausage_measure(s, 0.6))

###############################################################################
# The harmonic sequence 1/n.  Its gaps shrink like n^-2, so small radii
# merge the tail into one solid block while the head stays resolved.

n = np.arange(1, 10**6 + 1, dtype=float)
harmonic = PointSet(1 / n)
for eps in (1e-2, 1e-3, 1e-4, 1e-5):
    print(f"eps={eps:.0e}  |S_eps|={sausage_measure(harmonic, eps):.6f}")

###############################################################################
# The slope of log |S_eps| against log eps gives 1 - d.  The rarefaction
# index reads the same number off the terms alone.

for beta in (2.0, 1.0, 0.5, 1 / 3):
    a = n ** -beta
    s = dim_sausage(PointSet(a))
    t = dim_tricot(a)
    print(f"beta={beta:.3f}  sausage={s.d:.4f}  tricot={t.d:.4f}  expected={1 / (1 + beta):.4f}")

###############################################################################
# Geometric sequences are too sparse to have any dimension.

print(dim_sausage(PointSet(2.0 ** -np.arange(1, 51)), 1e-2, 1e-12).d)
