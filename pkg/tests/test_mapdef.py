"""Map handles: builtins, expression maps, resolution, local Newton."""

import numpy as np
import pytest

from liftkit import (
    DomainError,
    InputError,
    expression_map,
    jacobian_at,
    local_solve,
    resolve_map,
)
from liftkit.errors import NonConvergenceError


def test_shear_handle_analytic_jacobian(shear3):
    assert shear3.jacobian_mode == "analytic"
    jac = jacobian_at(shear3, np.array([0.0, 1.0]))
    assert np.allclose(jac, [[1.0, 3.0], [0.0, 1.0]])


def test_shear_eval(shear3):
    assert np.allclose(shear3.eval(np.array([1.0, 2.0])), [9.0, 2.0])


def test_expression_map_ad_jacobian():
    f = resolve_map("(x*x, x+y)")
    assert f.jacobian_mode == "automatic"
    jac = jacobian_at(f, np.array([2.0, 0.5]))
    assert np.allclose(jac, [[4.0, 0.0], [1.0, 1.0]])


def test_powk_zero_rejected():
    with pytest.raises(InputError):
        resolve_map("powk(0)")


def test_identity_jacobian():
    f = resolve_map("identity(3)")
    jac = jacobian_at(f, np.array([5.0, -1.0, 0.5]))
    assert np.allclose(jac, np.eye(3))


def test_expmap_jacobian_at_zero(expmap):
    assert np.allclose(jacobian_at(expmap, np.array([0.0])), [[1.0]])


def test_unknown_bare_name_lists_builtins():
    with pytest.raises(InputError) as exc:
        resolve_map("nosuchmap")
    assert "unknown map" in str(exc.value)
    assert "shear3" in str(exc.value)


def test_shear_inverse_composes(shear3):
    g = resolve_map("shear3_inv")
    pts = np.array([[1.0, 2.0], [-3.0, 0.5], [10.0, -2.0]])
    back = np.stack([g.eval(shear3.eval(p)) for p in pts])
    assert np.allclose(back, pts, atol=1e-12)


def test_logmap_rejects_nonpositive():
    f = resolve_map("logmap")
    with pytest.raises((DomainError, Exception)):
        f.eval(np.array([-1.0]))


def test_finite_difference_override(shear3):
    fd = resolve_map("shear3", jacobian_mode="finite_difference")
    assert fd.jacobian_mode == "finite_difference"
    a = jacobian_at(fd, np.array([0.3, 0.7]))
    b = jacobian_at(shear3, np.array([0.3, 0.7]))
    assert np.allclose(a, b, atol=1e-6)


def test_jacobians_many_matches_single(shear3):
    pts = np.array([[0.0, 1.0], [1.0, -2.0], [0.5, 0.5]])
    many = shear3.jacobians_many(pts)
    for i, p in enumerate(pts):
        assert np.allclose(many[i], jacobian_at(shear3, p))


def test_local_solve_identity():
    f = resolve_map("identity(2)")
    res = local_solve(f, np.array([3.0, -1.0]), np.array([0.0, 0.0]))
    assert np.allclose(res.coords, [3.0, -1.0])
    assert res.residual <= 1e-10


def test_local_solve_cubic_section():
    f = expression_map("y^3 + y", variables=("y",))
    res = local_solve(f, np.array([2.0]), np.array([0.0]))
    assert res.coords[0] == pytest.approx(1.0, abs=1e-9)


def test_local_solve_reports_iterations(shear3):
    res = local_solve(f=shear3, y=np.array([9.0, 2.0]), x_guess=np.array([0.0, 0.0]))
    assert np.allclose(res.coords, [1.0, 2.0], atol=1e-9)
    assert res.iterations >= 1
    assert res.jac_smin > 0


def test_local_solve_nonconvergence_raises(expmap):
    # e^x = -1 has no solution; iterates run off to -inf until either
    # the budget or the derivative underflow stops them
    from liftkit import SingularJacobianError

    with pytest.raises((NonConvergenceError, SingularJacobianError)):
        local_solve(expmap, np.array([-1.0]), np.array([0.0]), max_iter=20)


def test_polar_exp_matches_formula(polar_exp):
    p = np.array([0.5, 1.2])
    got = polar_exp.eval(p)
    want = [np.exp(0.5) * np.cos(1.2), np.exp(0.5) * np.sin(1.2)]
    assert np.allclose(got, want)


def test_annulus_domain_enforced():
    f = resolve_map("powk(2)")
    with pytest.raises(DomainError):
        f.eval(np.array([0.0, 0.0]))


def test_expression_map_with_domain_and_name():
    from liftkit import subset_from_expression, Euclidean

    dom = subset_from_expression(Euclidean(1), "x")
    f = expression_map("log(x)", variables=("x",), domain=dom, name="halflog")
    assert f.name == "halflog"
    assert np.allclose(f.eval(np.array([1.0])), [0.0])
    with pytest.raises(DomainError):
        f.eval(np.array([-2.0]))


def test_cubic_implicit_builtin_shape():
    f = resolve_map("cubic_implicit")
    assert f.dim_in == 2 and f.dim_out == 1
    assert np.allclose(f.eval(np.array([2.0, 1.0])), [0.0])
