"""Fibers, sheets, and monodromy.

A covering map hits each target the same number of times; the fiber
enumerator finds those preimages by deterministic multistart, and the
sheet counter finds them again by lifting the target around a loop and
following where the preimage lands after each turn. When the two agree
the count is trustworthy. Maps with infinite fibers show up as
translation monodromy instead: the orbit never closes and the shift
per turn is reported.
"""

import numpy as np

from liftkit import (
    Euclidean,
    fiber_enumerate,
    quasi_isometry_bounds,
    resolve_map,
    sheet_count,
)
from liftkit.geometry import Box, Loop

plane = Euclidean(2)
loop = Loop(plane, np.zeros(2), 1.0)
target = np.array([1.0, 0.0])

print("== cube roots by two independent methods ==")
cube = resolve_map("powk(3)")
fib = fiber_enumerate(cube, target)
print("multistart found %d preimages of (1, 0):" % fib.count)
for pt, res in zip(fib.preimages, fib.residuals):
    print("  %s  residual %.1e" % (np.round(pt.coords, 6), res))

orb = sheet_count(cube, target, loop, np.array([1.0, 0.0]))
print("loop orbit found %d sheets; %s" % (orb.sheets, orb.note))
print("monodromy: %s permutation %s" % (orb.monodromy["kind"], orb.monodromy["permutation"]))

print()
print("== infinite fibers show up as translation ==")
polar = resolve_map("polar_exp")
rep = sheet_count(polar, target, loop, np.zeros(2), max_orbit=8)
print("sheets: %s (%s)" % (rep.sheets, rep.note))
print(
    "each turn shifts the preimage by %s"
    % np.round(np.asarray(rep.monodromy["vector"]), 9)
)

print()
print("== quasi-isometry bounds ==")
shear = resolve_map("shear3")
region = Box(np.array([-1.0, -1.0]), np.array([1.0, 1.0]))
qi = quasi_isometry_bounds(shear, region)
print("shear3 on [-1,1]^2 distorts distances between the extreme factors:")
print("  alpha (worst contraction) = %.6f" % qi.alpha_hat)
print("  beta  (worst expansion)   = %.6f" % qi.beta_hat)
print("  (%s)" % qi.note)
