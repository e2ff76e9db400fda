"""Mean-value inequalities for path images.

For a path q and a map f, the length of the image curve is pinched
between inf D- times the length of q and sup D+ times the length of q.
find_tau produces a bisection certificate: a parameter tau where the
pointwise derivative already explains the global length ratio. The
split inequality underlying the bisection is checked directly at many
interior parameters.
"""

import numpy as np

from liftkit import (
    Euclidean,
    Segment,
    find_tau,
    length_bounds_report,
    resolve_map,
    split_inequality_slack,
)

shear = resolve_map("shear3")
plane = Euclidean(2)
q = Segment(plane, np.array([0.0, 0.0]), np.array([1.0, 1.0]))

print("== length bounds ==")
rep = length_bounds_report(shear, q)
print("flat length      %.6f" % rep.len_q)
print("image length     %.6f" % rep.len_p)
print("lower bound      %.6f (inf D- * flat)  pass=%s" % (rep.lower_rhs, rep.lower_pass))
print("upper bound      %.6f (sup D+ * flat)  pass=%s" % (rep.upper_rhs, rep.upper_pass))

print()
print("== bisection certificates ==")
for direction in ("upper", "lower"):
    cert = find_tau(shear, q, direction=direction)
    print(
        "%5s: tau=%.9f  D at tau=%.6f  global ratio=%.6f  passed=%s"
        % (
            direction,
            cert.tau,
            cert.derivative_at_tau,
            cert.global_ratio,
            cert.passed,
        )
    )
    print(
        "       bisection depth %d, final interval slack %.2e"
        % (cert.depth, cert.final_slack)
    )

print()
print("== split inequality, checked pointwise ==")
worst = np.inf
for t in np.linspace(0.02, 0.98, 25):
    worst = min(worst, split_inequality_slack(shear, q, t=float(t)))
print("worst slack over 25 interior parameters: %.3e (>= 0 in exact arithmetic)" % worst)
