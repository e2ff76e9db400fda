"""Spaces, paths, lengths, reparametrization."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liftkit import (
    Box,
    CircleQuotient,
    DegenerateInputError,
    Euclidean,
    ExpressionPath,
    InputError,
    Loop,
    Point,
    Sampled,
    Segment,
    Torus,
    distance,
    path_length,
    polyline,
    reparam_arclength,
    reverse_path,
    subset_from_expression,
)
from oracles import L_PARABOLA


def test_euclidean_distance():
    s = Euclidean(2)
    assert distance(s, np.array([0.0, 0.0]), np.array([3.0, 4.0])) == 5.0


def test_one_norm_distance():
    s = Euclidean(2, p=1.0)
    assert distance(s, np.array([0.0, 0.0]), np.array([3.0, 4.0])) == 7.0


def test_circle_wraparound():
    s = CircleQuotient()
    d = distance(s, np.array([0.1]), np.array([2 * np.pi - 0.1]))
    assert d == pytest.approx(0.2, abs=1e-12)


def test_torus_distance_componentwise_arcs():
    s = Torus(2)
    a = np.array([0.1, 0.0])
    b = np.array([2 * np.pi - 0.1, 0.0])
    assert distance(s, a, b) == pytest.approx(0.2, abs=1e-12)


def test_segment_midpoint():
    s = Euclidean(2)
    seg = Segment(s, np.array([0.0, 0.0]), np.array([2.0, 2.0]))
    a, b = seg.domain
    mid = seg.eval(0.5 * (a + b))
    assert np.allclose(mid, [1.0, 1.0])


def test_loop_start_convention():
    s = Euclidean(2)
    loop = Loop(s, np.array([0.0, 0.0]), 1.0, winding=1)
    assert np.allclose(loop.eval(loop.domain[0]), [1.0, 0.0], atol=1e-15)


def test_sampled_linear_interpolation():
    s = Euclidean(2)
    p = Sampled(s, [0.0, 1.0], [[0.0, 0.0], [4.0, 0.0]])
    assert np.allclose(p.eval(0.25), [1.0, 0.0])


def test_sampled_rejects_decreasing_parameters():
    s = Euclidean(1)
    with pytest.raises(InputError):
        Sampled(s, [1.0, 0.0], [[0.0], [1.0]])


def test_unit_circle_circumference():
    s = Euclidean(2)
    loop = Loop(s, np.array([0.0, 0.0]), 1.0)
    res = path_length(loop)
    assert res.converged
    assert res.value == pytest.approx(2 * np.pi, abs=1e-6)


def test_segment_length_exact_at_first_refinement():
    s = Euclidean(2)
    seg = Segment(s, np.array([0.0, 0.0]), np.array([3.0, 4.0]))
    res = path_length(seg)
    assert res.value == 5.0
    assert res.partitions_used <= 2


def test_parabola_length_oracle():
    s = Euclidean(2)
    p = ExpressionPath(s, "(t, t^2)", (0.0, 1.0))
    res = path_length(p)
    assert res.converged
    assert res.value == pytest.approx(L_PARABOLA, rel=1e-9)


def test_reparam_unit_speed_half_point():
    s = Euclidean(2)
    p = ExpressionPath(s, "(t, t^2)", (0.0, 1.0))
    total = path_length(p).require()
    q = reparam_arclength(p)
    a, b = q.domain
    assert b - a == pytest.approx(total, rel=1e-6)
    # half-parameter point sits at half arc length
    half = q.eval(a + 0.5 * (b - a))
    # oracle by fine uniform resampling of the original path
    ts = np.linspace(0.0, 1.0, 200001)
    pts = p.eval_many(ts)
    cum = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))])
    idx = np.searchsorted(cum, 0.5 * cum[-1])
    assert np.linalg.norm(half - pts[idx]) < 1e-4


def test_reparam_segment_exact():
    s = Euclidean(2)
    seg = Segment(s, np.array([0.0, 0.0]), np.array([3.0, 4.0]))
    q = reparam_arclength(seg)
    assert q.domain == (0.0, 5.0)
    assert np.allclose(q.eval(2.5), [1.5, 2.0])


def test_reparam_constant_path_degenerate():
    s = Euclidean(2)
    p = Sampled(s, [0.0], [[1.0, 1.0]], degenerate=True)
    q = reparam_arclength(p)
    assert q.degenerate
    assert q.domain == (0.0, 0.0)


def test_reverse_segment():
    s = Euclidean(2)
    seg = Segment(s, np.array([0.0, 0.0]), np.array([1.0, 2.0]))
    r = reverse_path(seg)
    assert np.allclose(r.eval(r.domain[0]), [1.0, 2.0])
    assert np.allclose(r.eval(r.domain[1]), [0.0, 0.0])


def test_reverse_is_involution():
    s = Euclidean(2)
    p = ExpressionPath(s, "(cos(t), sin(2*t))", (0.0, 2.0))
    rr = reverse_path(reverse_path(p))
    ts = np.linspace(0.0, 2.0, 41)
    assert np.allclose(rr.eval_many(ts), p.eval_many(ts), atol=1e-12)


def test_reversed_parabola_length_matches():
    s = Euclidean(2)
    p = ExpressionPath(s, "(t, t^2)", (0.0, 1.0))
    r = reverse_path(p)
    assert path_length(r).require() == pytest.approx(
        path_length(p).require(), abs=1e-9
    )


def test_open_subset_sign_convention():
    base = Euclidean(2)
    disk = subset_from_expression(base, "1 - x^2 - y^2")
    assert disk.contains(np.array([0.5, 0.0]))
    assert not disk.contains(np.array([1.5, 0.0]))


def test_point_canonicalizes_on_quotient():
    s = CircleQuotient()
    p = Point(np.array([2 * np.pi + 0.3]), s)
    assert p.coords[0] == pytest.approx(0.3, abs=1e-12)


def test_box_corners_and_contains():
    b = Box(np.array([0.0, 0.0]), np.array([1.0, 2.0]))
    corners = b.corners()
    assert corners.shape == (4, 2)
    assert b.contains_many(corners).all()
    assert not b.contains_many(np.array([[2.0, 0.5]]))[0]


@given(
    st.lists(
        st.tuples(
            st.floats(-5, 5, allow_nan=False, allow_infinity=False),
            st.floats(-5, 5, allow_nan=False, allow_infinity=False),
        ),
        min_size=2,
        max_size=8,
    )
)
@settings(max_examples=50, deadline=None)
def test_polyline_length_equals_chord_sum(knot_list):
    knots = np.array(knot_list, dtype=float)
    s = Euclidean(2)
    p = polyline(s, knots)
    res = path_length(p)
    chords = float(np.linalg.norm(np.diff(knots, axis=0), axis=1).sum())
    assert res.value == pytest.approx(chords, rel=1e-9, abs=1e-12)


@given(
    st.floats(-3, 3, allow_nan=False),
    st.floats(-3, 3, allow_nan=False),
    st.floats(-3, 3, allow_nan=False),
    st.floats(-3, 3, allow_nan=False),
)
@settings(max_examples=50, deadline=None)
def test_triangle_inequality_euclidean(ax, ay, bx, by):
    s = Euclidean(2)
    a = np.array([ax, ay])
    b = np.array([bx, by])
    o = np.zeros(2)
    assert distance(s, a, b) <= distance(s, a, o) + distance(s, o, b) + 1e-12


def test_path_length_degenerate_loop_radius():
    s = Euclidean(2)
    with pytest.raises(InputError):
        Loop(s, np.array([0.0, 0.0]), -1.0)


def test_length_result_require_raises_on_nonconverged():
    s = Euclidean(1)
    seg = Segment(s, np.array([0.0]), np.array([1.0]))
    res = path_length(seg)
    res.require()
    bad = type(res)(
        value=res.value,
        partitions_used=res.partitions_used,
        certificate=res.certificate,
        converged=False,
    )
    with pytest.raises(DegenerateInputError):
        bad.require()
