"""Lifting codomain paths through a local homeomorphism.

Given f and a path p in the codomain, a lift is a domain path g with
f(g(t)) = p(t) that starts at a chosen preimage. The engine advances a
predictor-corrector along p and reports how far it got as a fraction
b of the path domain. A complete lift (b = 1) inverts f along p; a
failed lift localizes where invertibility degrades, and the verdict
says how it degraded.
"""

import numpy as np

from liftkit import Euclidean, Segment, analyze_trace, lift_path, resolve_map

plane = Euclidean(2)

print("== a successful lift is a pointwise inverse ==")
shear = resolve_map("shear3")
target = np.array([9.0, 2.0])
p = Segment(plane, np.zeros(2), target)
trace = lift_path(shear, p, np.zeros(2))
print("verdict:   %s after %d nodes" % (trace.verdict.kind, len(trace.nodes)))
print("endpoint:  %s" % trace.final_coords)
print("expected:  [1. 2.] (explicit inverse of (x + y^3, y))")
print("residual:  %.2e" % trace.nodes[-1].residual)

print()
print("== a lift that must fail ==")
# expmap covers only the positive half line; pushing its output to 0
# forces the preimage to run away to -infinity
expmap = resolve_map("expmap")
line = Euclidean(1)
p = Segment(line, np.array([1.0]), np.array([0.0]))
trace = lift_path(expmap, p, np.array([0.0]))
v = trace.verdict
print("verdict:  %s" % v.kind)
print("reached:  b = %.6f of the path (never quite 1)" % v.b)
print("endpoint: x = %.2f and still falling" % trace.final_coords[0])
print("note:     %s" % v.engine_note)

print()
print("== trace anatomy ==")
analysis = analyze_trace(trace)
print("lift length:    %.3f (the domain curve is long)" % trace.lift_length)
print("tail diameters: %s" % ["b=%.3f: %.2e" % bd for bd in analysis.tail_diameters[-3:]])
print("alpha_hat:      %.4f (local expansion estimate near the stop)" % analysis.alpha_hat)

print()
print("== loops upstairs need not close downstairs ==")
polar = resolve_map("polar_exp")
from liftkit.geometry import Loop

loop = Loop(plane, np.zeros(2), 1.0)
trace = lift_path(polar, loop, np.zeros(2))
print("lifted a full turn around the origin through polar_exp")
print("start of lift: %s" % trace.nodes[0].coords)
print("end of lift:   %s (shifted by 2*pi in the angle slot)" % trace.final_coords)
