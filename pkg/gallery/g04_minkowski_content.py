"""
Minkowski content of a quadratic recursion
==========================================

Once d is known, |S_eps| / eps^(1 - d) should settle to a constant.
For x -> x - A x^alpha that constant has a closed form guess, and the
window extrema of the normalized measure bracket it.
"""
from bifdim import MapSystem, PointSet, content_bounds, content_estimate, iterate
from bifdim import conjectured_content

for expr, x1, A in (("x^2", 0.5, 1.0), ("2*x^2", 0.25, 2.0)):
    xs = iterate(MapSystem.recursion(expr), x1, 10**6).xs
    est = content_estimate(PointSet(xs), 0.5)
    guess = conjectured_content(A, 2.0)
    print(f"f={expr:6s} window extrema [{est.lower:.4f}, {est.upper:.4f}]  guess {guess:.4f}")

###############################################################################
# Bounds from envelope constants.  When the envelopes coincide the two
# bounds collapse onto the guess.

A, alpha = 1.0, 2.0
beta = 1 / (alpha - 1)
a = (beta / A) ** beta
print(content_bounds(A, A, a, a, alpha), conjectured_content(A, alpha))
print(content_bounds(1.0, 2.0, 0.5, 1.0, alpha))

###############################################################################
# A flat f pushes the dimension toward 1 slowly.

from bifdim import dim_tricot

xs = iterate(MapSystem.recursion("exp(-1/x)"), 0.5, 10**6).xs
for k in (10**4, 10**5, 10**6):
    print(k, round(dim_tricot(xs[:k]).d, 4))
