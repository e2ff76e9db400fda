"""Expression language: parsing, evaluation, dual-number derivatives."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liftkit.errors import EvalDomainError, ParseError
from liftkit.exprlang import (
    eval_ast,
    jacobian_ad,
    parse,
    parse_single,
    pretty,
    substitute,
)


def test_tuple_source_yields_two_components():
    asts = parse("(x + y^3, y)", ("x", "y"))
    assert len(asts) == 2
    assert asts[0].variables == ("x", "y")


def test_incomplete_expression_reports_offset():
    with pytest.raises(ParseError) as exc:
        parse("x + ", ("x",))
    assert exc.value.offset == 4


def test_power_is_right_associative():
    a = parse_single("2^3^2")
    assert eval_ast(a, []) == 512.0


def test_shear_evaluation():
    asts = parse("(x + y^3, y)", ("x", "y"))
    vals = [eval_ast(a, [1.0, 2.0]) for a in asts]
    assert vals == [9.0, 2.0]


def test_log_negative_is_domain_fault():
    a = parse_single("log(x)", ("x",))
    with pytest.raises(EvalDomainError):
        eval_ast(a, [-1.0])


def test_atan_quarter_pi():
    a = parse_single("atan(x)", ("x",))
    assert eval_ast(a, [1.0]) == pytest.approx(math.pi / 4, abs=1e-15)


def test_division_by_zero_is_domain_fault():
    a = parse_single("1/x", ("x",))
    with pytest.raises(EvalDomainError):
        eval_ast(a, [0.0])


def test_shear_jacobian_by_dual_numbers():
    asts = parse("(x + y^3, y)", ("x", "y"))
    jac = jacobian_ad(asts, [0.0, 1.0])
    assert np.allclose(jac, [[1.0, 3.0], [0.0, 1.0]])


def test_exp_jacobian_at_zero():
    asts = parse("exp(x)", ("x",))
    jac = jacobian_ad(asts, [0.0])
    assert np.allclose(jac, [[1.0]])


def test_vectorized_evaluation_matches_scalar():
    a = parse_single("sin(x)*x + cos(x)^2", ("x",))
    xs = np.linspace(-2.0, 2.0, 17)
    vec = eval_ast(a, [xs])
    scalars = [eval_ast(a, [float(v)]) for v in xs]
    assert np.allclose(vec, scalars)


def test_variable_inference_prefix_order():
    asts = parse("(y, x)")
    assert asts[0].variables == ("x", "y")
    a = parse_single("t + 1")
    assert a.variables == ("t",)


def test_unknown_function_rejected():
    with pytest.raises(ParseError):
        parse_single("frobnicate(x)", ("x",))


def test_substitute_then_eval():
    a = parse_single("x^2 + 1", ("x",))
    b = substitute(a, "x", parse_single("2*x", ("x",)).root)
    assert eval_ast(b, [3.0]) == pytest.approx(37.0)


_SIMPLE = st.one_of(
    st.integers(min_value=0, max_value=9).map(str),
    st.sampled_from(["x", "y", "x + y", "x*y", "sin(x)", "exp(y)", "x^2"]),
)


@st.composite
def _expr_text(draw, depth=2):
    if depth == 0:
        return draw(_SIMPLE)
    op = draw(st.sampled_from(["+", "-", "*"]))
    left = draw(_expr_text(depth=depth - 1))
    right = draw(_expr_text(depth=depth - 1))
    return "(%s) %s (%s)" % (left, op, right)


@given(_expr_text())
@settings(max_examples=60, deadline=None)
def test_pretty_print_round_trip(source):
    a = parse_single(source, ("x", "y"))
    again = parse_single(pretty(a), ("x", "y"))
    for px, py in [(0.3, -0.7), (1.5, 2.0), (-2.0, 0.1)]:
        assert eval_ast(again, [px, py]) == pytest.approx(
            eval_ast(a, [px, py]), rel=1e-12, abs=1e-12
        )


@given(
    st.floats(min_value=-3, max_value=3, allow_nan=False),
    st.floats(min_value=-3, max_value=3, allow_nan=False),
)
@settings(max_examples=60, deadline=None)
def test_dual_derivative_matches_finite_difference(px, py):
    asts = parse("(x*y + sin(x), exp(y) - x^2)", ("x", "y"))
    jac = jacobian_ad(asts, [px, py])
    h = 1e-6
    fd = np.empty((2, 2))
    for col in range(2):
        hi = [px, py]
        lo = [px, py]
        hi[col] += h
        lo[col] -= h
        for row, a in enumerate(asts):
            fd[row, col] = (eval_ast(a, hi) - eval_ast(a, lo)) / (2 * h)
    assert np.allclose(jac, fd, rtol=1e-4, atol=1e-6)
