"""Global inversion, fibers, monodromy, and quasi-isometry estimates.

invert_at turns the lifting engine into an inverse-function evaluator:
lift the straight segment from f(x0) to the target and read off the
endpoint. Fibers are enumerated by deterministic multistart (with the
mandatory caveat that multistart cannot prove completeness), sheets
are counted by lifting a loop around the target until the orbit
closes, and quasi-isometry constants are sampled over regions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EvalDomainError, InputError, NonConvergenceError, SingularJacobianError
from .geometry import (
    POINT_IDENTITY_RTOL,
    Box,
    Point,
    Segment,
    polyline,
)
from .lift import ContinuationFailure, LiftOptions, lift_path
from .mapdef import local_solve
from .sampling import unit_box_points

__all__ = [
    "invert_at",
    "FiberReport",
    "fiber_enumerate",
    "sheet_count",
    "QIBounds",
    "quasi_isometry_bounds",
    "path_battery",
    "COMPLETENESS_NOTE",
    "TRANSLATION_TOL",
]

COMPLETENESS_NOTE = (
    "best-effort multistart enumeration; completeness is not guaranteed"
)
TRANSLATION_TOL = 1e-6


def _coords(space, value):
    return space.check_coords(value.coords if isinstance(value, Point) else value)


def invert_at(f, y, x0, opts=None):
    """Evaluate the global inverse of f at y by lifting the segment
    from f(x0) to y starting at x0. Returns the preimage Point when the
    lift completes; raises ContinuationFailure carrying the verdict and
    the partial trace otherwise."""
    yc = _coords(f.codomain, y)
    x0c = _coords(f.domain, x0)
    y_start = f.eval(x0c)
    seg = Segment(f.codomain, y_start, yc)
    trace = lift_path(f, seg, x0c, opts)
    if trace.verdict.completed:
        return Point(trace.final_coords, f.domain)
    raise ContinuationFailure(trace.verdict, trace)


@dataclass
class FiberReport:
    target: Point
    preimages: list
    residuals: list
    method: str  # multistart | loop_orbit
    note: str
    monodromy: dict = None
    sheets: int = None
    verdict: object = None  # lift verdict when an orbit aborted early
    n_starts: int = 0

    @property
    def count(self):
        return len(self.preimages)

    def check(self, space, tol):
        for r in self.residuals:
            assert r <= tol
        pts = [p.coords for p in self.preimages]
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                d = float(
                    space.distance_many(pts[i][None, :], pts[j][None, :])[0]
                )
                scale = 1.0 + max(
                    space.chart_norm(pts[i]), space.chart_norm(pts[j])
                )
                assert d > POINT_IDENTITY_RTOL * scale


def fiber_enumerate(f, y, seed_region=None, n_starts=64, tol=1e-10):
    """Enumerate preimages of y by deterministic multistart Newton.

    Solutions are deduplicated at point-identity tolerance and sorted
    lexicographically. The report's note states the best-effort
    semantics: an empty or short list never proves the fiber small.
    """
    if f.domain.dim != f.codomain.dim:
        raise InputError("fiber enumeration needs a square system")
    yc = _coords(f.codomain, y)
    if seed_region is None:
        half = 4.0 * (1.0 + float(np.linalg.norm(yc)))
        seed_region = Box(np.full(f.domain.dim, -half), np.full(f.domain.dim, half))
    # rejection-sample the region so restrictive domains (thin annuli,
    # small open subsets) still get the full multistart budget
    for oversample in (1, 4, 16, 64):
        cand = f.domain.canonical(
            seed_region.scale(unit_box_points(oversample * n_starts, f.domain.dim))
        )
        starts = cand[f.domain.contains_many(cand)]
        if starts.shape[0] >= n_starts:
            starts = starts[:n_starts]
            break

    found = []
    residuals = []
    for s in starts:
        try:
            res = local_solve(f, yc, s, tol=tol, max_iter=60)
        except (
            NonConvergenceError,
            SingularJacobianError,
            DomainError,
            EvalDomainError,
        ):
            continue
        c = res.coords
        dup = False
        for k in found:
            d = float(f.domain.distance_many(c[None, :], k[None, :])[0])
            scale = 1.0 + max(f.domain.chart_norm(c), f.domain.chart_norm(k))
            if d <= POINT_IDENTITY_RTOL * scale:
                dup = True
                break
        if not dup:
            found.append(c)
            residuals.append(res.residual)

    order = sorted(range(len(found)), key=lambda i: tuple(found[i]))
    report = FiberReport(
        target=Point(yc, f.codomain),
        preimages=[Point(found[i], f.domain) for i in order],
        residuals=[residuals[i] for i in order],
        method="multistart",
        note=COMPLETENESS_NOTE,
        n_starts=int(starts.shape[0]),
    )
    report.check(f.domain, tol * (1.0 + 1e-12))
    return report


def sheet_count(f, y, loop, x_start, max_orbit=8, opts=None):
    """Count sheets over y by repeatedly lifting the loop.

    Starting at x_start, lift the loop, collect the endpoint, and lift
    again from it; the orbit closing at the k-th step witnesses k
    sheets (a cyclic deck action on the visited points). If the orbit
    stays open for max_orbit rounds, a constant difference between
    successive endpoints is reported as a deck translation.
    """
    opts = opts or LiftOptions()
    yc = _coords(f.codomain, y)
    xc = _coords(f.domain, x_start)
    t0, t1 = loop.domain
    scale = 1.0 + float(np.linalg.norm(yc))
    for t_end in (t0, t1):
        gap = float(
            f.codomain.distance_many(loop.eval(t_end)[None, :], yc[None, :])[0]
        )
        if gap > 1e-9 * scale:
            raise InputError(
                "loop endpoint at t=%g misses the target by %g" % (t_end, gap)
            )
    gap = float(f.codomain.distance_many(f.eval(xc)[None, :], yc[None, :])[0])
    if gap > opts.corrector_tol:
        raise InputError("f(x_start) misses the target by %g" % gap)

    orbit = [xc.copy()]
    residuals = [gap]
    monodromy = None
    sheets = None
    verdict = None
    note = ""
    for _ in range(max_orbit):
        trace = lift_path(f, loop, orbit[-1], opts)
        if not trace.verdict.completed:
            verdict = trace.verdict
            monodromy = {"kind": "aborted"}
            note = "lift failed mid-orbit: " + trace.verdict.summary()
            break
        end = trace.final_coords
        closed_at = None
        for j, prev in enumerate(orbit):
            d = float(f.domain.distance_many(end[None, :], prev[None, :])[0])
            tol_id = POINT_IDENTITY_RTOL * (
                1.0 + max(f.domain.chart_norm(end), f.domain.chart_norm(prev))
            )
            # orbit closure is decided at a looser tolerance than point
            # identity: endpoint error accumulates over the whole lift
            if d <= max(tol_id, 1e3 * opts.corrector_tol):
                closed_at = j
                break
        if closed_at is not None:
            sheets = len(orbit) - closed_at
            perm = [(i + 1) % sheets for i in range(sheets)]
            monodromy = {"kind": "cyclic", "order": sheets, "permutation": perm}
            note = "orbit closed after %d lift(s)" % len(orbit)
            break
        orbit.append(end)
        residuals.append(trace.nodes[-1].residual)

    if monodromy is None:
        note = "no return within %d orbits" % max_orbit
        diffs = np.diff(np.stack(orbit), axis=0)
        if diffs.shape[0] >= 2 and np.all(
            np.abs(diffs - diffs[0]) <= TRANSLATION_TOL
        ):
            monodromy = {
                "kind": "translation",
                "vector": diffs.mean(axis=0),
            }
        else:
            monodromy = {"kind": "open"}

    return FiberReport(
        target=Point(yc, f.codomain),
        preimages=[Point(c, f.domain) for c in orbit],
        residuals=residuals,
        method="loop_orbit",
        note=note,
        monodromy=monodromy,
        sheets=sheets,
        verdict=verdict,
    )


@dataclass
class QIBounds:
    alpha_hat: float
    beta_hat: float
    region: Box
    n_samples: int
    alpha_K: float = None
    n_in_K: int = None
    note: str = "sampled estimate over deterministic points, not a bound"

    def __post_init__(self):
        assert 0.0 <= self.alpha_hat <= self.beta_hat


def quasi_isometry_bounds(f, region, n_samples=512, compact_K=None):
    """Sampled quasi-isometry constants over a bounded region: the
    smallest lower and largest upper scalar derivative across samples
    (box corners and center always included). With compact_K, also the
    restricted lower constant over samples whose image lands in K."""
    if not isinstance(region, Box):
        raise InputError("region must be a Box")
    if region.dim != f.domain.dim:
        raise InputError("region dimension mismatch")
    pts = region.scale(unit_box_points(n_samples, region.dim))
    extras = [region.corners(), 0.5 * (region.lo + region.hi)[None, :]]
    pts = f.domain.canonical(np.concatenate([pts] + extras, axis=0))
    pts = pts[f.domain.contains_many(pts)]
    if pts.shape[0] == 0:
        raise InputError("no samples land inside the domain")
    jacs = f.jacobians_many(pts)
    sv = np.linalg.svd(jacs, compute_uv=False)
    smax, smin = sv[:, 0], sv[:, -1]
    if jacs.shape[2] > jacs.shape[1]:
        smin = np.zeros_like(smin)  # wide Jacobian cannot be injective
    alpha = float(smin.min())
    beta = float(smax.max())
    alpha_K = None
    n_in_K = None
    if compact_K is not None:
        vals = f.eval_many(pts)
        mask = compact_K.contains_many(vals)
        n_in_K = int(mask.sum())
        if n_in_K:
            alpha_K = float(smin[mask].min())
    return QIBounds(
        alpha_hat=alpha,
        beta_hat=beta,
        region=region,
        n_samples=int(pts.shape[0]),
        alpha_K=alpha_K,
        n_in_K=n_in_K,
    )


def path_battery(space, anchor, scale, n=20):
    """Deterministic battery of rectifiable paths near an anchor point:
    a rotating mix of segments, open polylines, and closed polylines,
    all inside the cube anchor + scale*[-1/2, 1/2]^dim."""
    anchor = space.check_coords(anchor)
    u = unit_box_points(4 * n, space.dim).reshape(n, 4, space.dim)
    pts = anchor + scale * (u - 0.5)
    out = []
    for i in range(n):
        kind = i % 3
        if kind == 0:
            out.append(Segment(space, pts[i, 0], pts[i, 1]))
        elif kind == 1:
            out.append(polyline(space, pts[i]))
        else:
            knots = np.concatenate([pts[i, :3], pts[i, :1]], axis=0)
            out.append(polyline(space, knots))
    return out
