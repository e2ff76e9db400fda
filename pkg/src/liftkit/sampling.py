"""Deterministic low-discrepancy sampling helpers.

All draws are reproducible: Sobol sequences are unscrambled, and the
golden-angle circle sequence is closed-form, so equal inputs give
byte-equal samples across runs and platforms.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import norm, qmc

from .errors import InputError

__all__ = ["unit_box_points", "box_points", "sphere_directions"]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def unit_box_points(n, dim, skip_origin=True):
    """n low-discrepancy points in [0,1)^dim (Sobol, unscrambled)."""
    if n < 1 or dim < 1:
        raise InputError("need n >= 1 and dim >= 1")
    eng = qmc.Sobol(d=dim, scramble=False)
    if skip_origin:
        eng.fast_forward(1)
    return eng.random(n)


def box_points(box, n):
    """n low-discrepancy points inside an axis-aligned box."""
    return box.scale(unit_box_points(n, box.dim))


def sphere_directions(n, dim):
    """n roughly equidistributed unit vectors in R^dim.

    dim 1 alternates +1/-1; dim 2 uses the golden-angle sequence;
    higher dimensions push Sobol points through the normal quantile and
    normalize.
    """
    if n < 1:
        raise InputError("need n >= 1")
    if dim == 1:
        out = np.ones((n, 1))
        out[1::2, 0] = -1.0
        return out
    if dim == 2:
        ang = 2.0 * math.pi * ((np.arange(1, n + 1) * _GOLDEN) % 1.0)
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    u = unit_box_points(n, dim)
    z = norm.ppf(np.clip(u, 1e-12, 1.0 - 1e-12))
    norms = np.linalg.norm(z, axis=1)
    norms[norms == 0] = 1.0
    return z / norms[:, None]
