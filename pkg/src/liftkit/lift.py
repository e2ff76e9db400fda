"""Path lifting by predictor-corrector continuation.

Given f with equal domain and codomain dimensions, a path p in the
codomain, and a starting preimage x0 of p(start), the engine extends
the lift node by node: a Jacobian predictor step followed by a damped
Newton corrector onto the next path point. Failure is classified, not
hidden: blow-up, near-singular Jacobian, step-size collapse, or domain
exit, each with the furthest parameter reached.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    EvalDomainError,
    InputError,
    LiftkitError,
    NonConvergenceError,
    SingularJacobianError,
)
from .geometry import OpenSubset, Point
from .mapdef import jacobian_at, local_solve

__all__ = [
    "LiftOptions",
    "LiftNode",
    "LiftTrace",
    "Verdict",
    "ContinuationFailure",
    "lift_path",
    "analyze_trace",
    "TraceAnalysis",
    "COMPLETED",
    "FAILED_BLOWUP",
    "FAILED_SINGULAR",
    "FAILED_STALL",
    "FAILED_DOMAIN_EXIT",
]

COMPLETED = "Completed"
FAILED_BLOWUP = "FailedBlowUp"
FAILED_SINGULAR = "FailedSingular"
FAILED_STALL = "FailedStall"
FAILED_DOMAIN_EXIT = "FailedDomainExit"

_ENGINE_NOTE = (
    "engine-conservative: the abstract continuation criterion needs only "
    "a convergent subsequence of lifted values; this engine demands a "
    "converging trace and may fail on oscillating lifts"
)


@dataclass(frozen=True)
class LiftOptions:
    step_init: float = 1e-2
    step_min: float = 1e-12
    step_max: float = 0.1
    corrector_tol: float = 1e-10
    blowup_radius: float = 1e6
    singular_threshold: float = 1e-10
    record_monitors: bool = True
    growth: float = 1.5
    max_corrector_iter: int = 25
    max_nodes: int = 100000

    def __post_init__(self):
        if not (0.0 < self.step_min <= self.step_init <= self.step_max):
            raise InputError("need 0 < step_min <= step_init <= step_max")
        if self.corrector_tol <= 0:
            raise InputError("corrector_tol must be positive")


@dataclass(frozen=True)
class LiftNode:
    t: float
    coords: np.ndarray
    residual: float
    d_minus: float
    step: float


@dataclass(frozen=True)
class Verdict:
    kind: str
    b: float = 1.0
    last_norm: float = None
    d_minus: float = None
    message: str = ""
    engine_note: str = None

    @property
    def completed(self):
        return self.kind == COMPLETED

    def summary(self):
        parts = [self.kind]
        if not self.completed:
            parts.append("b=%.12g" % self.b)
        if self.last_norm is not None:
            parts.append("last_norm=%.6g" % self.last_norm)
        if self.d_minus is not None:
            parts.append("d_minus=%.6g" % self.d_minus)
        if self.message:
            parts.append(self.message)
        return " ".join(parts)


@dataclass
class LiftTrace:
    map_name: str
    path_kind: str
    path_domain: tuple
    nodes: list
    verdict: Verdict
    lift_length: float
    options: LiftOptions
    space_dim: int

    def node_arrays(self):
        ts = np.array([n.t for n in self.nodes])
        xs = np.stack([n.coords for n in self.nodes])
        res = np.array([n.residual for n in self.nodes])
        dm = np.array([n.d_minus for n in self.nodes])
        st = np.array([n.step for n in self.nodes])
        return ts, xs, res, dm, st

    @property
    def final_coords(self):
        return self.nodes[-1].coords

    def interpolate(self, t):
        """Piecewise-linear interpolation of the lift at parameter t."""
        ts, xs, _, _, _ = self.node_arrays()
        t = float(t)
        if t < ts[0] - 1e-12 or t > ts[-1] + 1e-12:
            raise InputError(
                "parameter %g outside lifted range [%g, %g]" % (t, ts[0], ts[-1])
            )
        return np.array(
            [np.interp(t, ts, xs[:, i]) for i in range(xs.shape[1])]
        )

    def to_csv(self):
        cols = (
            ["t"]
            + ["x_%d" % (i + 1) for i in range(self.space_dim)]
            + ["residual", "d_minus", "step"]
        )
        lines = [",".join(cols)]
        for n in self.nodes:
            row = [n.t] + list(n.coords) + [n.residual, n.d_minus, n.step]
            lines.append(",".join("%.17g" % v for v in row))
        return "\n".join(lines) + "\n"


class ContinuationFailure(LiftkitError):
    """A continuation run ended with a failure verdict."""

    def __init__(self, verdict, trace):
        super().__init__(verdict.summary())
        self.verdict = verdict
        self.trace = trace


def _newton_polish(f, target, x, tol_keep, n_steps=3):
    """A few undamped Newton steps to tighten an endpoint; returns the
    best iterate, never worse than the input at tolerance tol_keep."""
    y = np.asarray(target, dtype=float)

    def resid(c):
        return float(
            f.codomain.distance_many(f.eval(c)[None, :], y[None, :])[0]
        )

    best = np.asarray(x, dtype=float)
    best_r = resid(best)
    cur = best
    for _ in range(n_steps):
        try:
            jac = jacobian_at(f, cur)
            step = np.linalg.solve(jac, -(f.codomain.canonical(f.eval(cur) - y)))
            nxt = f.domain.canonical(cur + step)
            if not f.domain.contains(nxt):
                break
            r = resid(nxt)
        except (np.linalg.LinAlgError, DomainError, EvalDomainError):
            break
        cur = np.asarray(nxt, dtype=float)
        if r < best_r:
            best, best_r = cur, r
        if r == 0.0:
            break
    if best_r <= tol_keep:
        return best, best_r
    return np.asarray(x, dtype=float), resid(np.asarray(x, dtype=float))


def lift_path(f, p, x0, opts=None):
    """Lift the path p through f starting at the preimage x0.

    Requires f(x0) = p(start) within corrector_tol and a square
    Jacobian. Returns a LiftTrace whose verdict is Completed or one of
    the failure kinds, with b the furthest parameter reached (last
    accepted parameter plus the final failed step, for stalls).
    """
    opts = opts or LiftOptions()
    if f.domain.dim != f.codomain.dim:
        raise InputError("path lifting needs equal domain and codomain dimensions")
    if p.space.dim != f.codomain.dim:
        raise InputError(
            "path lives in dimension %d, codomain has dimension %d"
            % (p.space.dim, f.codomain.dim)
        )
    t0, t1 = p.domain
    if t1 <= t0:
        raise InputError("path domain has zero width")
    span = t1 - t0

    x = f.domain.check_coords(x0.coords if isinstance(x0, Point) else x0).copy()
    p_start = p.eval(t0)
    r0 = float(
        f.codomain.distance_many(f.eval(x)[None, :], p_start[None, :])[0]
    )
    if r0 > opts.corrector_tol:
        raise InputError(
            "f(x0) misses p(start) by %.3g (corrector_tol %.3g)"
            % (r0, opts.corrector_tol)
        )

    def smin_at(c):
        sv = np.linalg.svd(jacobian_at(f, c), compute_uv=False)
        return float(sv[-1])

    jac = jacobian_at(f, x)
    smin = float(np.linalg.svd(jac, compute_uv=False)[-1])
    nodes = [LiftNode(t0, x.copy(), r0, smin, 0.0)]
    lift_length = 0.0

    def make_trace(verdict):
        return LiftTrace(
            map_name=f.name,
            path_kind=p.kind,
            path_domain=(t0, t1),
            nodes=nodes,
            verdict=verdict,
            lift_length=lift_length,
            options=opts,
            space_dim=f.domain.dim,
        )

    def fail(kind, b, **kw):
        return make_trace(
            Verdict(kind=kind, b=min(b, 1.0), engine_note=_ENGINE_NOTE, **kw)
        )

    s = 0.0
    dt = opts.step_init
    p_cur = p_start
    while True:
        if len(nodes) >= opts.max_nodes:
            return fail(
                FAILED_STALL, s, message="node budget exhausted", d_minus=smin
            )
        dt = min(dt, 1.0 - s)
        target_t = t0 + (s + dt) * span
        target = p.eval(target_t)
        try:
            try:
                rhs = f.codomain.canonical(target - p_cur)
                xhat = x + np.linalg.solve(jac, rhs)
            except np.linalg.LinAlgError:
                xhat = x
            xhat = f.domain.canonical(xhat)
            if not f.domain.contains(xhat):
                xhat = x
            res = local_solve(
                f,
                target,
                xhat,
                tol=opts.corrector_tol,
                max_iter=opts.max_corrector_iter,
            )
        except (
            NonConvergenceError,
            SingularJacobianError,
            DomainError,
            EvalDomainError,
        ) as err:
            dt *= 0.5
            if dt < opts.step_min:
                b = s + 2.0 * dt  # the step that just failed
                if isinstance(err, DomainError):
                    return fail(
                        FAILED_DOMAIN_EXIT, b, message="corrector exits domain"
                    )
                if isinstance(f.domain, OpenSubset):
                    # a stall pressed against the boundary is an exit:
                    # probe whether the undamped newton direction leaves
                    try:
                        probe = f.domain.canonical(
                            x + np.linalg.solve(jac, f.codomain.canonical(target - p_cur))
                        )
                        if not f.domain.contains(probe):
                            return fail(
                                FAILED_DOMAIN_EXIT,
                                b,
                                message="newton direction leaves the domain",
                            )
                    except np.linalg.LinAlgError:
                        pass
                if isinstance(err, SingularJacobianError):
                    return fail(FAILED_SINGULAR, b, d_minus=smin)
                return fail(FAILED_STALL, b, d_minus=smin)
            continue

        x_new = res.coords.copy()
        lift_length += float(
            f.domain.chart_lengths(x_new[None, :], x[None, :])[0]
        )
        s += dt
        t_here = t0 + s * span
        smin = res.jac_smin
        nodes.append(LiftNode(t_here, x_new, res.residual, smin, dt * span))
        x = x_new
        p_cur = target
        jac = jacobian_at(f, x)

        if isinstance(f.domain, OpenSubset) and not f.domain.contains(x):
            return fail(
                FAILED_DOMAIN_EXIT, s, last_norm=f.domain.chart_norm(x)
            )
        if smin < opts.singular_threshold:
            return fail(FAILED_SINGULAR, s, d_minus=smin)
        norm = f.domain.chart_norm(x)
        if norm > opts.blowup_radius:
            return fail(FAILED_BLOWUP, s, last_norm=norm)
        if s >= 1.0:
            polished, pol_r = _newton_polish(
                f, target, x, tol_keep=opts.corrector_tol
            )
            if pol_r < res.residual:
                lift_length += float(
                    f.domain.chart_lengths(polished[None, :], x[None, :])[0]
                )
                nodes[-1] = LiftNode(t_here, polished, pol_r, smin_at(polished), 0.0)
            return make_trace(Verdict(kind=COMPLETED, b=1.0))
        dt = min(dt * opts.growth, opts.step_max)


@dataclass
class TraceAnalysis:
    alpha_hat: float
    weighted_alpha_hat: float
    tail_diameters: list  # (t, diameter of nodes with parameter >= t)
    verdict_echo: Verdict
    anchor: np.ndarray = None


def _suffix_diameters(space, ts, xs, levels=12):
    t_first, t_last = ts[0], ts[-1]
    if ts.shape[0] > 1500:
        # diameter scan is quadratic; thin long traces but keep the ends
        stride = int(np.ceil(ts.shape[0] / 1500.0))
        keep = np.unique(np.r_[np.arange(0, ts.shape[0], stride), ts.shape[0] - 1])
        ts, xs = ts[keep], xs[keep]
    out = []
    for j in range(levels + 1):
        t_cut = t_last - (t_last - t_first) * 2.0**-j
        sel = xs[ts >= t_cut]
        if sel.shape[0] <= 1:
            out.append((float(t_cut), 0.0))
            continue
        diam = 0.0
        # pairwise in blocks to bound memory on long traces
        block = 512
        for i in range(0, sel.shape[0], block):
            a = sel[i : i + block]
            for k in range(0, sel.shape[0], block):
                bpts = sel[k : k + block]
                d = space.distance_many(
                    np.repeat(a, bpts.shape[0], axis=0),
                    np.tile(bpts, (a.shape[0], 1)),
                )
                diam = max(diam, float(d.max()))
        out.append((float(t_cut), diam))
    return out


def analyze_trace(trace, weight=None, x0_anchor=None, domain_space=None):
    """Monitors over a finished trace: the infimum of the smallest
    singular value along the lift (alpha_hat), its weighted variant,
    and the suffix diameters on a dyadic parameter grid (a Cauchy
    check: on convergent lifts they decay to node spacing)."""
    if len(trace.nodes) < 2:
        raise InputError("trace analysis needs at least 2 nodes")
    ts, xs, _, dm, _ = trace.node_arrays()
    alpha_hat = float(dm.min())
    space = domain_space
    if space is None:
        from .geometry import Euclidean

        space = Euclidean(trace.space_dim)
    anchor = (
        xs[0]
        if x0_anchor is None
        else np.asarray(
            x0_anchor.coords if isinstance(x0_anchor, Point) else x0_anchor,
            dtype=float,
        )
    )
    weighted = None
    if weight is not None:
        dists = space.distance_many(xs, np.broadcast_to(anchor, xs.shape))
        w_vals = np.array([float(weight(d)) for d in dists])
        weighted = float((dm * w_vals).min())
    return TraceAnalysis(
        alpha_hat=alpha_hat,
        weighted_alpha_hat=weighted,
        tail_diameters=_suffix_diameters(space, ts, xs),
        verdict_echo=trace.verdict,
        anchor=anchor,
    )
