"""Paths, spaces, and arc length.

Builds the three basic path kinds (segment, polyline, expression path),
measures them with the adaptive chord-doubling length routine, and
shows how a map stretches a path by comparing flat length against the
length of the image curve.
"""

import numpy as np

from liftkit import (
    Euclidean,
    Segment,
    mapped_path,
    path_length,
    polyline,
    reparam_arclength,
    resolve_map,
)
from liftkit.geometry import ExpressionPath, Loop

plane = Euclidean(2)

print("== flat lengths ==")
diag = Segment(plane, np.array([0.0, 0.0]), np.array([1.0, 1.0]))
res = path_length(diag)
print("unit diagonal: length %.12f (sqrt(2) = %.12f)" % (res.value, np.sqrt(2)))

zigzag = polyline(plane, np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [2.0, 1.0]]))
print("three-leg polyline: length %.6f (exact 3)" % path_length(zigzag).value)

# quarter of the unit parabola y = x^2, written as an expression path
parab = ExpressionPath(plane, "(t, t^2)", (0.0, 1.0))
res = path_length(parab)
print(
    "parabola arc over [0,1]: length %.12f, converged=%s after %d partitions"
    % (res.value, res.converged, res.partitions_used)
)

print()
print("== mapped lengths ==")
shear = resolve_map("shear3")
image = mapped_path(shear, diag)
print("shear3 stretches the diagonal from %.6f" % path_length(diag).value)
print("                              to   %.6f" % path_length(image).value)

ring = Loop(plane, np.array([0.0, 0.0]), 1.0)
print("unit loop length: %.9f (2*pi = %.9f)" % (path_length(ring).value, 2 * np.pi))

print()
print("== arc-length reparametrization ==")
fast_then_slow = ExpressionPath(plane, "(t^3, 0)", (0.0, 1.0))
even = reparam_arclength(fast_then_slow)
a, b = even.domain
mid = even.eval(0.5 * (a + b))
print("cubic-speed segment, halfway point after reparametrization: %s" % mid)
print("(the halfway point of the raw parameter would be (0.125, 0))")
