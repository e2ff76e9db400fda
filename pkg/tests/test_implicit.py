"""Implicit continuation: Davidenko stepping, folds, branches, weights."""

import numpy as np
import pytest

from liftkit import (
    AffineWeight,
    Box,
    ContinuationFailure,
    Euclidean,
    ImplicitOptions,
    ImplicitProblem,
    InputError,
    Segment,
    branch_probe,
    davidenko_lift,
    expression_map,
    implicit_eval,
    resolve_map,
)
from oracles import FOLD_X, FOLD_Y, KEPLER_ROOT


def _cubic():
    return ImplicitProblem(resolve_map("cubic_implicit"), 1, np.array([0.0]))


def _x_segment(prob, a, b):
    return Segment(prob.x_space, np.atleast_1d(float(a)), np.atleast_1d(float(b)))


def test_problem_split_validation():
    with pytest.raises(InputError):
        ImplicitProblem(resolve_map("cubic_implicit"), 2, np.array([0.0]))


def test_cubic_endpoint_oracle():
    prob = _cubic()
    trace = davidenko_lift(prob, _x_segment(prob, 0.0, 2.0), np.array([0.0]))
    assert trace.verdict.kind == "Completed"
    assert trace.final_y[0] == pytest.approx(1.0, abs=1e-8)


def test_identity_section_tracks_path():
    f = expression_map("y - x", variables=("x", "y"))
    prob = ImplicitProblem(f, 1, np.array([0.0]))
    trace = davidenko_lift(prob, _x_segment(prob, 0.0, 5.0), np.array([0.0]))
    assert trace.verdict.kind == "Completed"
    for node in trace.nodes:
        assert node.y[0] == pytest.approx(node.x[0], abs=1e-8)


def test_kepler_endpoint_matches_bisection():
    f = expression_map("y + 0.5*sin(y) - x", variables=("x", "y"))
    prob = ImplicitProblem(f, 1, np.array([0.0]))
    trace = davidenko_lift(prob, _x_segment(prob, 0.0, 1.0), np.array([0.0]))
    assert trace.verdict.kind == "Completed"
    assert trace.final_y[0] == pytest.approx(KEPLER_ROOT, abs=1e-8)


def test_fold_terminates_singular():
    f = expression_map("y^3 - y - x", variables=("x", "y"))
    prob = ImplicitProblem(f, 1, np.array([0.0]))
    trace = davidenko_lift(prob, _x_segment(prob, 0.0, FOLD_X), np.array([1.0]))
    assert trace.verdict.kind == "FailedSingular"
    # last accepted y-block smallest singular value under the threshold
    assert trace.nodes[-1].jy_smin < 1e-6
    # the stop sits near the fold ordinate
    assert trace.final_y[0] == pytest.approx(FOLD_Y, abs=1e-2)


def test_residual_bounded_on_all_traces(rng):
    f = expression_map("y + 0.5*sin(y) - x", variables=("x", "y"))
    prob = ImplicitProblem(f, 1, np.array([0.0]))
    for _ in range(3):
        b = float(rng.uniform(0.5, 3.0))
        trace = davidenko_lift(prob, _x_segment(prob, 0.0, b), np.array([0.0]))
        assert trace.verdict.kind == "Completed"
        assert max(n.residual for n in trace.nodes) <= 1e-8


def test_implicit_eval_forward_and_reverse():
    prob = _cubic()
    y = implicit_eval(prob, np.array([2.0]), (np.array([0.0]), np.array([0.0])))
    assert y.coords[0] == pytest.approx(1.0, abs=1e-8)
    y0 = implicit_eval(prob, np.array([0.0]), (np.array([2.0]), np.array([1.0])))
    assert y0.coords[0] == pytest.approx(0.0, abs=1e-8)


def test_start_consistency_checked():
    prob = _cubic()
    with pytest.raises(InputError):
        davidenko_lift(prob, _x_segment(prob, 0.0, 1.0), np.array([5.0]))


def test_weight_audit_holds_for_dominating_weight():
    prob = _cubic()
    trace = davidenko_lift(
        prob,
        _x_segment(prob, 0.0, 2.0),
        np.array([0.0]),
        weight=AffineWeight(1.0, 1.0),
    )
    assert trace.verdict.kind == "Completed"
    assert trace.weight_check in ("holds", "not applicable")
    assert trace.monitor_ok in (True, False)


def test_weight_audit_absent_without_weight():
    prob = _cubic()
    trace = davidenko_lift(prob, _x_segment(prob, 0.0, 2.0), np.array([0.0]))
    assert trace.weight_check is None
    assert not trace.weight_used


def test_trace_csv_columns():
    prob = _cubic()
    trace = davidenko_lift(prob, _x_segment(prob, 0.0, 2.0), np.array([0.0]))
    lines = trace.to_csv().strip().splitlines()
    assert lines[0].startswith("t,x_1,y_1,residual,monitor")
    assert len(lines) == len(trace.nodes) + 1


def test_branch_probe_cubic_single_group():
    prob = _cubic()
    rep = branch_probe(
        prob,
        Box(np.array([-2.0]), np.array([2.0])),
        Box(np.array([-2.0]), np.array([2.0])),
    )
    assert rep.count == 1


def test_branch_probe_parabola_two_groups():
    f = expression_map("y^2 - x", variables=("x", "y"))
    prob = ImplicitProblem(f, 1, np.array([0.0]))
    rep = branch_probe(
        prob,
        Box(np.array([0.5]), np.array([4.0])),
        Box(np.array([-3.0]), np.array([3.0])),
    )
    assert rep.count == 2
    assert "heuristic" in rep.note


def test_branch_probe_identity_section_one_group():
    f = expression_map("y - x", variables=("x", "y"))
    prob = ImplicitProblem(f, 1, np.array([0.0]))
    rep = branch_probe(
        prob,
        Box(np.array([-1.0]), np.array([1.0])),
        Box(np.array([-2.0]), np.array([2.0])),
    )
    assert rep.count == 1


def test_projection_map_roundtrip_consistency():
    # augmented lift through (x, y) -> (x, f(x, y)) agrees with the
    # davidenko endpoint
    prob = _cubic()
    g = prob.projection_map()
    p_aug = prob.augmented_path(_x_segment(prob, 0.0, 2.0))
    from liftkit import lift_path

    start = np.array([0.0, 0.0])
    trace = lift_path(g, p_aug, start)
    assert trace.verdict.kind == "Completed"
    dav = davidenko_lift(prob, _x_segment(prob, 0.0, 2.0), np.array([0.0]))
    assert trace.final_coords[-1] == pytest.approx(dav.final_y[0], abs=1e-9)


def test_monitor_positive_on_regular_trace():
    prob = _cubic()
    trace = davidenko_lift(prob, _x_segment(prob, 0.0, 2.0), np.array([0.0]))
    for node in trace.nodes:
        assert node.monitor >= 0.0
        assert node.jy_smin > 0.0


def test_options_respected():
    prob = _cubic()
    opts = ImplicitOptions(max_nodes=2)
    trace = davidenko_lift(
        prob, _x_segment(prob, 0.0, 2.0), np.array([0.0]), opts=opts
    )
    assert not trace.verdict.completed
