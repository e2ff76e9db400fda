"""Weight functions, ball-infimum profiles, and divergence diagnostics.

A weight is a positive nondecreasing function on [0, infinity) whose
reciprocal has a divergent integral. Profiles estimate, radius by
radius, the infimum of the lower scalar derivative over closed balls
around a base point; their reciprocals are themselves weights, and the
classifier decides whether the profile's integral looks divergent.

A convergent or inconclusive profile never refutes anything: the
integral condition is sufficient, not necessary, and every report
produced here says so.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import DomainError, EvalDomainError, InputError
from .exprlang import eval_ast, parse_single
from .geometry import Box, Point
from .sampling import sphere_directions, unit_box_points

__all__ = [
    "Weight",
    "ConstantWeight",
    "AffineWeight",
    "PowerWeight",
    "ExpressionWeight",
    "TableWeight",
    "WeightValidation",
    "validate_weight",
    "HadamardProfile",
    "ball_infimum_profile",
    "DivergenceReport",
    "classify_divergence",
    "CertificateReport",
    "weight_certificate",
    "weight_from_profile",
    "NON_NECESSITY_CAVEAT",
    "CERT_TOL",
]

CERT_TOL = 1e-6
FIT_RMS_THRESHOLD = 0.15
POWER_GAMMA_BUFFER = 1.05
NON_NECESSITY_CAVEAT = (
    "sufficient condition only: a convergent or inconclusive integral "
    "never refutes the covering property"
)


class Weight:
    """Base class; subclasses are concrete weight families."""

    family = "abstract"
    divergence = "unknown"

    def __call__(self, delta):
        raise NotImplementedError

    def describe(self):
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantWeight(Weight):
    c: float
    family = "constant"
    divergence = "divergent"

    def __call__(self, delta):
        delta = np.asarray(delta, dtype=float)
        out = np.full(delta.shape, float(self.c))
        return out if out.ndim else float(out)

    def describe(self):
        return "constant %g" % self.c


@dataclass(frozen=True)
class AffineWeight(Weight):
    a: float
    b: float
    family = "affine"
    divergence = "divergent"

    def __call__(self, delta):
        delta = np.asarray(delta, dtype=float)
        out = self.a + self.b * delta
        return out if out.ndim else float(out)

    def describe(self):
        return "affine %g + %g t" % (self.a, self.b)


@dataclass(frozen=True)
class PowerWeight(Weight):
    a: float
    b: float
    gamma: float
    family = "power"

    @property
    def divergence(self):
        if self.b == 0 or self.gamma <= 1.0:
            return "divergent"
        return "convergent"

    def __call__(self, delta):
        delta = np.asarray(delta, dtype=float)
        out = self.a + self.b * np.power(delta, self.gamma)
        return out if out.ndim else float(out)

    def describe(self):
        return "power %g + %g t^%g" % (self.a, self.b, self.gamma)


class ExpressionWeight(Weight):
    """Weight given by a formula in the single variable t. Divergence
    of the reciprocal integral is decided numerically by
    validate_weight, never assumed."""

    family = "expression"

    def __init__(self, source):
        ast = parse_single(source)
        bad = [v for v in ast.variables if v != "t"]
        if bad:
            raise InputError(
                "weight expressions use the single variable t, got %s"
                % ", ".join(bad)
            )
        self.source = source
        self.ast = ast
        self.divergence = "unknown"

    def __call__(self, delta):
        delta = np.asarray(delta, dtype=float)
        scalar = delta.ndim == 0
        if self.ast.arity == 0:
            vals = np.full(np.atleast_1d(delta).shape, eval_ast(self.ast, []))
        else:
            vals = np.atleast_1d(eval_ast(self.ast, [np.atleast_1d(delta)]))
        return float(vals[0]) if scalar else vals

    def describe(self):
        return "expression %s" % self.source

    def __repr__(self):
        return "ExpressionWeight(%r)" % self.source


class TableWeight(Weight):
    """Right-continuous step weight from threshold/value tables. Used
    for weights built out of profile reciprocals: below the first
    threshold the first value applies; past the last, the last."""

    family = "table"
    divergence = "divergent"

    def __init__(self, thresholds, values):
        thresholds = np.asarray(thresholds, dtype=float)
        values = np.asarray(values, dtype=float)
        if thresholds.ndim != 1 or thresholds.shape != values.shape:
            raise InputError("thresholds and values must be matching 1-d arrays")
        if thresholds.size == 0:
            raise InputError("empty weight table")
        if np.any(np.diff(thresholds) <= 0):
            raise InputError("table thresholds must be strictly increasing")
        if np.any(~np.isfinite(values)) or np.any(values <= 0):
            raise InputError("table values must be positive and finite")
        # a weight is nondecreasing; a valid profile reciprocal already is
        if np.any(np.diff(values) < -1e-12 * np.abs(values[:-1])):
            raise InputError("table values must be nondecreasing")
        self.thresholds = thresholds
        self.values = values

    def __call__(self, delta):
        delta = np.asarray(delta, dtype=float)
        scalar = delta.ndim == 0
        d = np.atleast_1d(delta)
        # first threshold >= delta; past the end, clamp to the last bin
        idx = np.searchsorted(self.thresholds, d, side="left")
        idx = np.minimum(idx, self.thresholds.size - 1)
        out = self.values[idx]
        return float(out[0]) if scalar else out

    def describe(self):
        return "table weight on %d thresholds (max %g)" % (
            self.thresholds.size,
            self.thresholds[-1],
        )


@dataclass
class WeightValidation:
    ok: bool
    divergence: str
    reasons: list = field(default_factory=list)
    grid_max: float = 0.0


def _positivity_monotonicity(w, t_max, reasons):
    grid = np.concatenate(
        [
            np.linspace(0.0, t_max, 257),
            np.geomspace(max(t_max, 1.0) * 1e-6, max(t_max, 1.0), 128),
        ]
    )
    grid = np.unique(grid)
    try:
        vals = np.asarray(w(grid), dtype=float)
    except (EvalDomainError, DomainError) as err:
        reasons.append("evaluation failed on [0, %g]: %s" % (t_max, err))
        return False
    if np.any(~np.isfinite(vals)):
        reasons.append("non-finite values on [0, %g]" % t_max)
        return False
    if np.any(vals <= 0):
        t_bad = grid[np.argmax(vals <= 0)]
        reasons.append("not positive at t = %g" % t_bad)
        return False
    order = np.argsort(grid)
    v = vals[order]
    if np.any(np.diff(v) < -1e-9 * np.maximum(np.abs(v[:-1]), 1.0)):
        i = int(np.argmax(np.diff(v) < -1e-9 * np.maximum(np.abs(v[:-1]), 1.0)))
        reasons.append("decreasing near t = %g" % grid[order][i])
        return False
    return True


def _expression_tail_divergence(w, t_max, reasons):
    """Numeric tail heuristic: the reciprocal integral diverges when
    the weight is dominated by an affine comparison on the tail grid."""
    lo = max(t_max, 1.0)
    tail = np.geomspace(lo, lo * 1e6, 64)
    try:
        vals = np.asarray(w(tail), dtype=float)
    except (EvalDomainError, DomainError, OverflowError):
        reasons.append("tail evaluation overflows; treating integral as finite")
        return "convergent"
    if np.any(~np.isfinite(vals)) or np.any(vals <= 0):
        reasons.append("tail values leave (0, inf); treating integral as finite")
        return "convergent"
    ratio = vals / (1.0 + tail)
    # affine domination: the ratio to 1 + t must stop growing. Compare
    # the last grid point against the start of the final decade.
    k = int(np.argmax(tail >= tail[-1] / 10.0))
    growth = ratio[-1] / ratio[k] if ratio[k] > 0 else np.inf
    if growth <= 1.0 + 1e-2:
        return "divergent"
    # ratio still climbing; estimate the tail growth order
    half = tail.size // 2
    slope = np.polyfit(np.log(tail[half:]), np.log(vals[half:]), 1)[0]
    if slope > POWER_GAMMA_BUFFER:
        reasons.append(
            "tail grows like t^%.3g; reciprocal integral converges" % slope
        )
        return "convergent"
    reasons.append("tail not dominated by an affine weight; divergence unproven")
    return "unknown"


def validate_weight(w, t_max=100.0):
    """Positivity and monotonicity on a dense grid, and a divergence
    ruling: analytic for closed families, a tail-grid comparison for
    expressions. ok means "usable as a weight": positive, nondecreasing,
    and with a certified divergent reciprocal integral."""
    if not isinstance(w, Weight):
        raise InputError("expected a Weight instance")
    reasons = []
    shape_ok = _positivity_monotonicity(w, float(t_max), reasons)
    if isinstance(w, ExpressionWeight):
        divergence = (
            _expression_tail_divergence(w, float(t_max), reasons)
            if shape_ok
            else "unknown"
        )
    else:
        divergence = w.divergence
    if divergence == "convergent":
        reasons.append("reciprocal integral is finite; not admissible as a weight")
    elif divergence == "unknown":
        reasons.append("could not certify a divergent reciprocal integral")
    ok = shape_ok and divergence == "divergent"
    return WeightValidation(
        ok=ok, divergence=divergence, reasons=reasons, grid_max=float(t_max)
    )


# ---------------------------------------------------------------------------
# ball-infimum profiles


@dataclass
class HadamardProfile:
    x0: Point
    radii: np.ndarray
    infima: np.ndarray
    partial_integrals: np.ndarray
    samples_per_radius: np.ndarray
    regular: bool
    regularity_note: str
    sample_coords: np.ndarray
    sample_d_minus: np.ndarray
    sample_dists: np.ndarray
    map_name: str
    budget: int

    def check(self):
        assert np.all(np.diff(self.radii) > 0)
        assert np.all(np.diff(self.infima) <= 1e-15 + 1e-12 * self.infima[:-1])
        assert np.all(np.diff(self.partial_integrals) >= -1e-15)

    def to_csv(self):
        buf = io.StringIO()
        buf.write("t,r,partial_integral\n")
        for t, r, i in zip(self.radii, self.infima, self.partial_integrals):
            buf.write("%.17g,%.17g,%.17g\n" % (t, r, i))
        return buf.getvalue()


def _smin_batch(f, pts):
    jacs = f.jacobians_many(pts)
    sv = np.linalg.svd(jacs, compute_uv=False)
    return sv[:, -1]


def default_radii(x0_coords, n=24, decades=3.0):
    t_max = 1e2 * (1.0 + float(np.linalg.norm(x0_coords)))
    return np.geomspace(t_max * 10.0**-decades, t_max, n)


def ball_infimum_profile(f, x0, radii=None, budget=32, seed=0):
    """Estimate inf over closed balls around x0 of the lower scalar
    derivative, at each radius, by dense sampling plus Nelder-Mead
    polish from the best candidates (multistart count = budget,
    deterministic). The result is a best-effort upper estimate of each
    infimum; the sample budget is recorded so callers can tighten it.
    """
    if f.domain.dim != f.codomain.dim:
        raise InputError("profiles need a square Jacobian")
    dim = f.domain.dim
    x0c = f.domain.check_coords(x0.coords if isinstance(x0, Point) else x0)
    if radii is None:
        radii = default_radii(x0c)
    radii = np.asarray(radii, dtype=float)
    if radii.ndim != 1 or radii.size < 2 or np.any(np.diff(radii) <= 0):
        raise InputError("radii must be an increasing 1-d array")
    if np.any(radii <= 0):
        raise InputError("radii must be positive")
    if budget < 1:
        raise InputError("budget must be at least 1")

    t_last = radii[-1]
    all_pts = []

    n_boundary = min(64 * dim, 256)
    dirs = sphere_directions(n_boundary, dim)
    base_ball = unit_box_points(64 * dim, dim) * 2.0 - 1.0
    u = np.linspace(1.0 / base_ball.shape[0], 1.0, base_ball.shape[0])
    norms = np.linalg.norm(base_ball, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    ball_dirs = base_ball / norms
    interior_unit = ball_dirs * (u ** (1.0 / dim))[:, None]
    for t in radii:
        all_pts.append(x0c + t * dirs)
        all_pts.append(x0c + t * interior_unit)
    all_pts.append(x0c[None, :])
    cand = f.domain.canonical(np.concatenate(all_pts, axis=0))

    inside = f.domain.contains_many(cand)
    cand = cand[inside]
    dists = f.domain.distance_many(cand, np.broadcast_to(x0c, cand.shape))
    keep = dists <= t_last * (1.0 + 1e-12)
    cand, dists = cand[keep], dists[keep]
    smins = _smin_batch(f, cand)

    master_x = [cand]
    master_s = [smins]
    master_d = [dists]

    def record(c, s, d):
        master_x.append(np.asarray(c, dtype=float)[None, :])
        master_s.append(np.array([s]))
        master_d.append(np.array([d]))

    for t in radii:
        in_ball = dists <= t * (1.0 + 1e-12)
        if not np.any(in_ball):
            continue
        idx = np.where(in_ball)[0]
        order = idx[np.argsort(smins[idx], kind="stable")]
        starts = cand[order[:budget]]
        for s0 in starts:

            def objective(c):
                c = f.domain.canonical(np.asarray(c, dtype=float))
                if not f.domain.contains(c):
                    return 1e6
                d = float(
                    f.domain.distance_many(c[None, :], x0c[None, :])[0]
                )
                if d > t * (1.0 + 1e-12):
                    return 1e3 * (1.0 + d - t)
                try:
                    val = float(_smin_batch(f, c[None, :])[0])
                except (DomainError, EvalDomainError):
                    return 1e6
                if d <= t_last * (1.0 + 1e-12):
                    record(c, val, d)
                return val

            optimize.minimize(
                objective,
                s0,
                method="Nelder-Mead",
                options={
                    "maxfev": 50,
                    "xatol": 1e-6 * t,
                    "fatol": 0.0,
                    "disp": False,
                },
            )

    xs = np.concatenate(master_x, axis=0)
    ss = np.concatenate(master_s)
    ds = np.concatenate(master_d)

    regular = True
    note = ""
    bad = ~np.isfinite(ss) | (ss <= 0.0)
    if np.any(bad):
        regular = False
        note = (
            "not regular: %d sample(s) with vanishing lower derivative"
            % int(bad.sum())
        )

    infima = np.empty(radii.shape)
    counts = np.empty(radii.shape, dtype=int)
    for j, t in enumerate(radii):
        sel = ds <= t * (1.0 + 1e-12)
        counts[j] = int(sel.sum())
        infima[j] = float(ss[sel].min()) if counts[j] else np.inf
        if j > 0:
            infima[j] = min(infima[j], infima[j - 1])

    partial = np.zeros(radii.shape)
    if radii.size > 1:
        steps = 0.5 * (infima[1:] + infima[:-1]) * np.diff(radii)
        partial[1:] = np.cumsum(steps)

    prof = HadamardProfile(
        x0=Point(x0c, f.domain),
        radii=radii,
        infima=infima,
        partial_integrals=partial,
        samples_per_radius=counts,
        regular=regular,
        regularity_note=note,
        sample_coords=xs,
        sample_d_minus=ss,
        sample_dists=ds,
        map_name=f.name,
        budget=int(budget),
    )
    prof.check()
    return prof


def weight_from_profile(profile):
    """The reciprocal-infimum step weight of a profile. On the
    profile's own samples the domination product is >= 1 by
    construction, which is the constructive half of the lemma linking
    weights and ball infima."""
    if np.any(profile.infima <= 0) or np.any(~np.isfinite(profile.infima)):
        raise InputError(
            "profile has vanishing or non-finite infima; no weight exists"
        )
    return TableWeight(profile.radii, 1.0 / profile.infima)


# ---------------------------------------------------------------------------
# divergence classification


@dataclass
class DivergenceReport:
    klass: str  # divergent | convergent | inconclusive
    best_model: str
    fit_report: dict
    caveat: str
    window: tuple

    @property
    def divergent(self):
        return self.klass == "divergent"


def _fit_models(t, r):
    logt, logr = np.log(t), np.log(r)
    fits = {}

    c = float(np.exp(logr.mean()))
    rms = float(np.sqrt(np.mean((logr - math.log(c)) ** 2)))
    fits["constant"] = {"rms": rms, "params": {"c": c}, "divergent": True}

    resid = logr + logt
    c = float(np.exp(resid.mean()))
    rms = float(np.sqrt(np.mean((resid - math.log(c)) ** 2)))
    fits["c_over_t"] = {"rms": rms, "params": {"c": c}, "divergent": True}

    slope, intercept = np.polyfit(logt, logr, 1)
    gamma = -float(slope)
    pred = slope * logt + intercept
    rms = float(np.sqrt(np.mean((logr - pred) ** 2)))
    fits["power"] = {
        "rms": rms,
        "params": {"c": float(np.exp(intercept)), "gamma": gamma},
        # a fitted exponent near 1 is treated as the divergent c/t shape
        "divergent": gamma <= POWER_GAMMA_BUFFER,
    }

    slope, intercept = np.polyfit(t, logr, 1)
    beta = -float(slope)
    if beta > 0:
        pred = slope * t + intercept
        rms = float(np.sqrt(np.mean((logr - pred) ** 2)))
        fits["exponential"] = {
            "rms": rms,
            "params": {"c": float(np.exp(intercept)), "beta": beta},
            "divergent": False,
        }
    return fits


def classify_divergence(profile):
    """Fit the profile tail against the model zoo and rule on the
    integral. Divergent only with a good divergent fit; never a
    refutation when convergent (the condition is not necessary)."""
    t, r = profile.radii, profile.infima
    if t.size < 8:
        raise InputError("classification needs at least 8 radii")
    if math.log10(t[-1] / t[0]) < 1.5:
        raise InputError("classification needs radii spanning >= 1.5 decades")
    if np.any(r <= 0):
        return DivergenceReport(
            klass="inconclusive",
            best_model="none",
            fit_report={"note": "profile not regular; no fit attempted"},
            caveat=NON_NECESSITY_CAVEAT,
            window=(float(t[0]), float(t[-1])),
        )

    sel = t >= t[-1] / 10.0
    if sel.sum() < 4:
        sel = t >= t[-1] / 10.0**1.5
    tw, rw = t[sel], r[sel]
    fits = _fit_models(tw, rw)
    best = min(fits, key=lambda k: fits[k]["rms"])
    best_rms = fits[best]["rms"]
    if best_rms >= FIT_RMS_THRESHOLD:
        klass = "inconclusive"
    elif fits[best]["divergent"]:
        klass = "divergent"
    else:
        klass = "convergent"
    caveat = "" if klass == "divergent" else NON_NECESSITY_CAVEAT
    return DivergenceReport(
        klass=klass,
        best_model=best,
        fit_report=fits,
        caveat=caveat,
        window=(float(tw[0]), float(tw[-1])),
    )


# ---------------------------------------------------------------------------
# domination certificate


@dataclass
class CertificateReport:
    passed: bool
    worst_margin: float
    worst_point: np.ndarray
    n_samples: int
    note: str
    weight_ok: bool


def weight_certificate(
    f, x0, w, sample_region=None, n_samples=512, points=None, seed=0
):
    """Sampled check of the domination inequality: the lower scalar
    derivative times the weight of the distance to x0 must be >= 1 at
    every sample. worst_margin is min(product) - 1; pass needs
    worst_margin >= -1e-6.
    """
    x0c = f.domain.check_coords(x0.coords if isinstance(x0, Point) else x0)
    val = validate_weight(w)
    if not val.ok:
        raise InputError(
            "not a valid weight: " + "; ".join(val.reasons or ["unspecified"])
        )
    if points is not None:
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != f.domain.dim:
            raise InputError("points must have shape (n, dim)")
    else:
        region = sample_region
        if region is None:
            half = 1e1 * (1.0 + float(np.linalg.norm(x0c)))
            region = Box(x0c - half, x0c + half)
        pts = region.scale(unit_box_points(n_samples, f.domain.dim))
    pts = f.domain.canonical(pts)
    inside = f.domain.contains_many(pts)
    pts = pts[inside]
    if pts.shape[0] == 0:
        raise InputError("no certificate samples land inside the domain")
    smins = _smin_batch(f, pts)
    dists = f.domain.distance_many(pts, np.broadcast_to(x0c, pts.shape))
    products = smins * np.asarray(w(dists), dtype=float)
    i = int(np.argmin(products))
    worst = float(products[i] - 1.0)
    passed = worst >= -CERT_TOL
    note = (
        "Hadamard condition holds on sampled region"
        if passed
        else "domination fails at a sample; weight does not certify this region"
    )
    return CertificateReport(
        passed=passed,
        worst_margin=worst,
        worst_point=pts[i].copy(),
        n_samples=int(pts.shape[0]),
        note=note,
        weight_ok=True,
    )
