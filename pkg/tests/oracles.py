"""Frozen oracle values, computed independently of the library.

Each constant carries its derivation; none is produced by the code
under test. Bisection and closed forms were run in a separate scratch
session and the results frozen here.
"""

import math

# length of the parabola arc (t, t^2), t in [0, 1]:
# integral of sqrt(1 + 4 t^2) = sqrt(5)/2 + asinh(2)/4
L_PARABOLA = 1.4789428575445975

# singular values of the shear Jacobian [[1, a], [0, 1]] at a = 3:
# s^2 = (a^2 + 2 +- a sqrt(a^2 + 4)) / 2; det = 1 so smin = 1/smax
SIG_MAX_SHEAR = 3.302775637731995
SIG_MIN_SHEAR = 0.3027756377319946

# root of y + 0.5 sin y = 1 by 200 bisection steps on [0, 2]
KEPLER_ROOT = 0.6840366566778293

# fold of y^3 - y - x = 0: d/dy = 3y^2 - 1 = 0 at y = 1/sqrt(3),
# x = y^3 - y there
FOLD_Y = 0.5773502691896258
FOLD_X = -0.3849001794597505

# infimum of the smallest singular value of the shear Jacobian over
# the closed ball of radius t at the origin: a(y) = 3 y^2 peaks at
# |y| = t, and smin = 1/smax(a) is decreasing in a
def shear_ball_infimum(t):
    a = 3.0 * t * t
    return 1.0 / math.sqrt((a * a + 2.0 + a * math.sqrt(a * a + 4.0)) / 2.0)


SHEAR_INF_T1 = 0.3027756377319946
SHEAR_INF_T3 = 0.03698637068088356
SHEAR_INF_T10 = 0.0033332962971193186

# expmap against the affine weight 1 + t at x = -3:
# D^- * omega(|x|) = e^-3 * 4 < 1, a certificate counterexample
EXP_AFFINE_AT_M3 = 0.19914827347145578


def shear_inverse(u, v):
    """Explicit inverse of (x + y^3, y)."""
    return (u - v ** 3, v)


def shear_smin_at(y):
    """Smallest singular value of the shear Jacobian at ordinate y,
    in the cancellation-safe form 1/smax."""
    a = 3.0 * y * y
    smax = math.sqrt((a * a + 2.0 + a * math.sqrt(a * a + 4.0)) / 2.0)
    return 1.0 / smax


def shear_smax_at(y):
    a = 3.0 * y * y
    return math.sqrt((a * a + 2.0 + a * math.sqrt(a * a + 4.0)) / 2.0)
