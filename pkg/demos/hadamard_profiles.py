"""Ball-infimum profiles and the integral growth test.

The profile r(t) = inf { D-(f, x) : d(x, x0) = t } records how much the
map can flatten far from a base point. If the reciprocal profile grows
slowly enough that its integral diverges, the map inverts globally; the
classifier fits standard decay models to decide. The test is sufficient
but not necessary, which shear3 demonstrates: its profile decays too
fast, yet every target is reachable.
"""

import numpy as np

from liftkit import (
    AffineWeight,
    ExpressionWeight,
    ball_infimum_profile,
    classify_divergence,
    invert_at,
    resolve_map,
    validate_weight,
    weight_certificate,
    weight_from_profile,
)

for name, dim in (("identity(2)", 2), ("expmap", 1), ("shear3", 2)):
    f = resolve_map(name)
    prof = ball_infimum_profile(f, np.zeros(dim))
    cls = classify_divergence(prof)
    print("%-12s -> %-13s best model: %s" % (name, cls.klass, cls.best_model))
    row = ", ".join(
        "r(%.1f)=%.4f" % (t, r) for t, r in list(zip(prof.radii, prof.infima))[:4]
    )
    print("              %s" % row)
print()
print("the verdict for shear3 comes with a caveat:")
print("  %s" % classify_divergence(ball_infimum_profile(resolve_map("shear3"), np.zeros(2))).caveat)
print("and indeed inversion still succeeds far out:")
pre = invert_at(resolve_map("shear3"), np.array([-15.0, 18.0]), np.zeros(2))
print("  preimage of (-15, 18): %s" % pre.coords)

print()
print("== weights ==")
for label, w in (
    ("Affine(1,1)", AffineWeight(1.0, 1.0)),
    ("1 + t^2", ExpressionWeight("1 + t^2")),
    ("exp(t)", ExpressionWeight("exp(t)")),
):
    val = validate_weight(w)
    print("%-12s admissible=%-5s %s" % (label, val.ok, "; ".join(val.reasons) or "integral diverges"))

print()
print("== certificate round trip ==")
ident = resolve_map("identity(2)")
prof = ball_infimum_profile(ident, np.zeros(2))
w = weight_from_profile(prof)
cert = weight_certificate(ident, np.zeros(2), w, points=prof.sample_coords)
print("weight built from the identity profile, checked on the same samples:")
print("passed=%s worst margin=%.2e (needs D- * omega(d) >= 1)" % (cert.passed, cert.worst_margin))
