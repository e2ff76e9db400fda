"""Path lifting engine: completion, failure taxonomy, trace analysis."""

import numpy as np
import pytest

from liftkit import (
    ContinuationFailure,
    Euclidean,
    InputError,
    LiftOptions,
    Loop,
    Segment,
    analyze_trace,
    lift_path,
    resolve_map,
)
from oracles import shear_inverse


def _seg2(a, b):
    return Segment(Euclidean(2), np.asarray(a, float), np.asarray(b, float))


def test_identity_lift_tracks_path():
    f = resolve_map("identity(2)")
    p = _seg2([0.0, 0.0], [2.0, -1.0])
    trace = lift_path(f, p, np.array([0.0, 0.0]))
    assert trace.verdict.kind == "Completed"
    for node in trace.nodes:
        assert np.allclose(node.coords, p.eval(node.t), atol=1e-9)


def test_shear_segment_lands_on_inverse(shear3):
    p = _seg2([0.0, 0.0], [9.0, 2.0])
    trace = lift_path(shear3, p, np.array([0.0, 0.0]))
    assert trace.verdict.kind == "Completed"
    assert np.allclose(trace.final_coords, [1.0, 2.0], atol=1e-8)


def test_shear_random_targets_hit_explicit_inverse(shear3, rng):
    for _ in range(10):
        target = rng.uniform(-20, 20, size=2)
        p = _seg2([0.0, 0.0], target)
        trace = lift_path(shear3, p, np.array([0.0, 0.0]))
        assert trace.verdict.kind == "Completed"
        want = shear_inverse(*target)
        assert np.allclose(trace.final_coords, want, atol=1e-8)


def test_expmap_lift_toward_zero_fails(expmap):
    p = Segment(Euclidean(1), np.array([1.0]), np.array([0.0]))
    trace = lift_path(expmap, p, np.array([0.0]))
    v = trace.verdict
    assert not v.completed
    assert v.kind in ("FailedSingular", "FailedStall")
    assert v.b >= 0.999
    assert trace.final_coords[0] <= -5.0
    assert v.engine_note


def test_start_residual_checked(shear3):
    p = _seg2([1.0, 1.0], [2.0, 2.0])
    with pytest.raises(InputError):
        lift_path(shear3, p, np.array([0.0, 0.0]))


def test_nonsquare_map_rejected():
    f = resolve_map("inclusion")
    p = Segment(Euclidean(2), np.array([0.0, 0.0]), np.array([1.0, 0.0]))
    with pytest.raises(InputError):
        lift_path(f, p, np.array([0.0]))


def test_blowup_verdict():
    # 1-d map with bounded image: lifting past the image boundary sends
    # the preimage to infinity; arctan keeps d_minus ~ 1/(1+x^2) > 0
    # long enough that the radius guard fires first at a tight budget
    f = resolve_map("arctan")
    p = Segment(Euclidean(1), np.array([0.0]), np.array([1.6]))
    opts = LiftOptions(blowup_radius=50.0)
    trace = lift_path(f, p, np.array([0.0]), opts)
    assert trace.verdict.kind in ("FailedBlowUp", "FailedSingular", "FailedStall")
    assert trace.verdict.b < 1.0 or not trace.verdict.completed


def test_domain_exit_verdict():
    from liftkit import subset_from_expression, expression_map

    dom = subset_from_expression(Euclidean(1), "1 - x^2")
    f = expression_map("2*x", variables=("x",), domain=dom)
    p = Segment(Euclidean(1), np.array([0.0]), np.array([4.0]))
    trace = lift_path(f, p, np.array([0.0]))
    assert trace.verdict.kind == "FailedDomainExit"
    assert trace.verdict.b < 1.0


def test_loop_lift_polar_exp_shifts_by_two_pi(polar_exp):
    loop = Loop(Euclidean(2), np.array([0.0, 0.0]), 1.0)
    trace = lift_path(polar_exp, loop, np.array([0.0, 0.0]))
    assert trace.verdict.kind == "Completed"
    assert np.allclose(trace.final_coords, [0.0, 2 * np.pi], atol=1e-6)


def test_trace_interpolate_endpoint(shear3):
    p = _seg2([0.0, 0.0], [9.0, 2.0])
    trace = lift_path(shear3, p, np.array([0.0, 0.0]))
    a, b = trace.path_domain
    assert np.allclose(trace.interpolate(b), trace.final_coords)
    mid = trace.interpolate(0.5 * (a + b))
    assert mid.shape == (2,)


def test_trace_csv_shape(shear3):
    p = _seg2([0.0, 0.0], [9.0, 2.0])
    trace = lift_path(shear3, p, np.array([0.0, 0.0]))
    lines = trace.to_csv().strip().splitlines()
    assert lines[0] == "t,x_1,x_2,residual,d_minus,step"
    assert len(lines) == len(trace.nodes) + 1


def test_analysis_identity_alpha_one():
    f = resolve_map("identity(2)")
    p = _seg2([0.0, 0.0], [1.0, 1.0])
    trace = lift_path(f, p, np.array([0.0, 0.0]))
    analysis = analyze_trace(trace, domain_space=f.domain)
    assert analysis.alpha_hat == pytest.approx(1.0, abs=1e-12)


def test_analysis_expmap_alpha_collapses(expmap):
    p = Segment(Euclidean(1), np.array([1.0]), np.array([0.0]))
    trace = lift_path(expmap, p, np.array([0.0]))
    analysis = analyze_trace(trace, domain_space=expmap.domain)
    assert analysis.alpha_hat <= np.exp(-5.0)


def test_analysis_tail_diameters_decay(shear3):
    p = _seg2([0.0, 0.0], [9.0, 2.0])
    trace = lift_path(shear3, p, np.array([0.0, 0.0]))
    analysis = analyze_trace(trace, domain_space=shear3.domain)
    diams = [d for _, d in analysis.tail_diameters]
    assert all(b <= a + 1e-12 for a, b in zip(diams, diams[1:]))
    assert diams[-1] <= max(n.step for n in trace.nodes) * 10


def test_continuation_failure_exception_carries_trace(expmap):
    from liftkit import invert_at

    with pytest.raises(ContinuationFailure) as exc:
        invert_at(expmap, np.array([-1.0]), np.array([0.0]))
    assert exc.value.trace is not None
    assert not exc.value.verdict.completed


def test_options_validation():
    with pytest.raises(InputError):
        LiftOptions(step_init=0.0)
    with pytest.raises(InputError):
        LiftOptions(step_min=1.0, step_max=0.1)


def test_max_nodes_guard(shear3):
    p = _seg2([0.0, 0.0], [9.0, 2.0])
    opts = LiftOptions(max_nodes=3)
    trace = lift_path(shear3, p, np.array([0.0, 0.0]), opts)
    assert not trace.verdict.completed
