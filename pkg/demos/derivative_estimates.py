"""Lower and upper scalar derivatives.

D- and D+ of a map at a point are the extreme stretch factors of small
displacements. For differentiable maps they coincide with the extreme
singular values of the Jacobian; the shell sampler estimates them from
difference quotients alone and agrees with the SVD route to well under
a percent. The surjection constant sur(f, x) measures the largest ball
around f(x) guaranteed inside the image of a small ball, and equals D-
for local homeomorphisms.
"""

import numpy as np

from liftkit import resolve_map, scalar_derivatives, surjection_constant

shear = resolve_map("shear3")
x = np.array([0.0, 2.0])

print("== two routes to D-, D+ for shear3 at (0, 2) ==")
svd = scalar_derivatives(shear, x, method="jacobian_svd")
shell = scalar_derivatives(shear, x, method="shell_sampling")
print("jacobian_svd:   D- = %.9f   D+ = %.9f" % (svd.d_minus, svd.d_plus))
print("shell_sampling: D- = %.9f   D+ = %.9f" % (shell.d_minus, shell.d_plus))
print("per-shell (radius, min ratio, max ratio) diagnostics:")
for rho, lo, hi in shell.scale_report[-3:]:
    print("  rho=%.2e  min=%.6f  max=%.6f" % (rho, lo, hi))

print()
print("== duality with the explicit inverse ==")
inv = resolve_map("shear3_inv")
y = shear.eval(x)
prod = scalar_derivatives(inv, y).d_plus * svd.d_minus
print("D+(inverse at f(x)) * D-(forward at x) = %.12f (exactly 1 in theory)" % prod)

print()
print("== surjection constant ==")
sur = surjection_constant(shear, x)
print("sur(shear3, x) = %.9f vs D- = %.9f" % (sur.value, svd.d_minus))
print("per-radius Sur(f,x)(t)/t:", ["%.6f" % r for r in sur.ratios])

incl = resolve_map("inclusion")
sur0 = surjection_constant(incl, np.array([0.0]))
d0 = scalar_derivatives(incl, np.array([0.0]))
print()
print("inclusion of a line into the plane separates the two notions:")
print("  D- = %.1f (short curves keep their length)" % d0.d_minus)
print("  sur = %.1f (%s)" % (sur0.value, sur0.note))
