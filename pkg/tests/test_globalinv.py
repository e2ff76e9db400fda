"""Global inversion: pointwise inverse, fibers, monodromy, QI bounds."""

import numpy as np
import pytest

from liftkit import (
    Box,
    ContinuationFailure,
    Euclidean,
    Loop,
    fiber_enumerate,
    invert_at,
    path_battery,
    quasi_isometry_bounds,
    resolve_map,
    sheet_count,
)
from oracles import SIG_MAX_SHEAR, SIG_MIN_SHEAR, shear_inverse


def test_invert_identity():
    f = resolve_map("identity(2)")
    pre = invert_at(f, np.array([3.0, -4.0]), np.array([0.0, 0.0]))
    assert np.allclose(pre.coords, [3.0, -4.0], atol=1e-10)


def test_invert_shear_oracle(shear3):
    pre = invert_at(shear3, np.array([9.0, 2.0]), np.array([0.0, 0.0]))
    assert np.allclose(pre.coords, [1.0, 2.0], atol=1e-8)


def test_invert_shear_random_targets(shear3, rng):
    for _ in range(8):
        y = rng.uniform(-15, 15, size=2)
        pre = invert_at(shear3, y, np.array([0.0, 0.0]))
        assert np.allclose(pre.coords, shear_inverse(*y), atol=1e-8)


def test_invert_expmap_outside_image_fails(expmap):
    with pytest.raises(ContinuationFailure) as exc:
        invert_at(expmap, np.array([-1.0]), np.array([0.0]))
    assert not exc.value.verdict.completed


def test_fiber_identity_single():
    f = resolve_map("identity(2)")
    rep = fiber_enumerate(f, np.array([0.5, 0.5]))
    assert rep.count == 1
    assert np.allclose(rep.preimages[0].coords, [0.5, 0.5], atol=1e-9)


def test_fiber_powk2_square_roots():
    f = resolve_map("powk(2)")
    rep = fiber_enumerate(f, np.array([1.0, 0.0]))
    assert rep.count == 2
    got = sorted(tuple(np.round(p.coords, 6)) for p in rep.preimages)
    assert got == [(-1.0, 0.0), (1.0, 0.0)]


def test_fiber_shear_unique(shear3, rng):
    for _ in range(3):
        y = rng.uniform(-5, 5, size=2)
        rep = fiber_enumerate(shear3, y)
        assert rep.count == 1
        assert np.allclose(rep.preimages[0].coords, shear_inverse(*y), atol=1e-8)


def test_fiber_note_is_best_effort(shear3):
    rep = fiber_enumerate(shear3, np.array([1.0, 1.0]))
    assert "best-effort" in rep.note


def test_fiber_check_validates_residuals():
    f = resolve_map("powk(2)")
    rep = fiber_enumerate(f, np.array([1.0, 0.0]))
    rep.check(f.domain, 1e-8)


def test_sheets_identity_orbit_one():
    f = resolve_map("identity(2)")
    loop = Loop(Euclidean(2), np.array([0.0, 0.0]), 1.0)
    rep = sheet_count(f, np.array([1.0, 0.0]), loop, np.array([1.0, 0.0]))
    assert rep.sheets == 1
    assert rep.monodromy["kind"] == "cyclic"
    assert rep.monodromy["order"] == 1


def test_sheets_powk2_two():
    f = resolve_map("powk(2)")
    loop = Loop(Euclidean(2), np.array([0.0, 0.0]), 1.0)
    rep = sheet_count(f, np.array([1.0, 0.0]), loop, np.array([1.0, 0.0]))
    assert rep.sheets == 2
    orbit = sorted(tuple(np.round(p.coords, 6)) for p in rep.preimages)
    assert orbit == [(-1.0, 0.0), (1.0, 0.0)]


@pytest.mark.parametrize("k", [2, 3, 4])
def test_sheets_agree_with_fiber(k):
    f = resolve_map("powk(%d)" % k)
    loop = Loop(Euclidean(2), np.array([0.0, 0.0]), 1.0)
    orbit_rep = sheet_count(f, np.array([1.0, 0.0]), loop, np.array([1.0, 0.0]))
    fiber_rep = fiber_enumerate(f, np.array([1.0, 0.0]))
    assert orbit_rep.sheets == k
    assert fiber_rep.count == k


def test_polar_exp_translation_monodromy(polar_exp):
    loop = Loop(Euclidean(2), np.array([0.0, 0.0]), 1.0)
    rep = sheet_count(
        polar_exp, np.array([1.0, 0.0]), loop, np.array([0.0, 0.0]), max_orbit=8
    )
    assert rep.sheets is None
    assert rep.monodromy["kind"] == "translation"
    vec = np.asarray(rep.monodromy["vector"])
    assert np.allclose(vec, [0.0, 2 * np.pi], atol=1e-6)
    assert len(rep.preimages) == 9  # start plus 8 orbits, no return


def test_sheets_requires_matching_target(shear3):
    loop = Loop(Euclidean(2), np.array([0.0, 0.0]), 1.0)
    from liftkit import InputError

    with pytest.raises(InputError):
        sheet_count(shear3, np.array([5.0, 5.0]), loop, np.array([0.0, 0.0]))


def test_qi_identity_one():
    f = resolve_map("identity(2)")
    region = Box(np.array([-1.0, -1.0]), np.array([1.0, 1.0]))
    b = quasi_isometry_bounds(f, region)
    assert b.alpha_hat == pytest.approx(1.0, abs=1e-12)
    assert b.beta_hat == pytest.approx(1.0, abs=1e-12)


def test_qi_shear_extremes_at_corners(shear3):
    region = Box(np.array([-1.0, -1.0]), np.array([1.0, 1.0]))
    b = quasi_isometry_bounds(shear3, region)
    assert b.beta_hat == pytest.approx(SIG_MAX_SHEAR, rel=1e-9)
    assert b.alpha_hat == pytest.approx(SIG_MIN_SHEAR, rel=1e-9)


def test_qi_expmap_compact_restriction(expmap):
    region = Box(np.array([-3.0]), np.array([3.0]))
    K = Box(np.array([np.exp(-1.0)]), np.array([np.exp(1.0)]))
    b = quasi_isometry_bounds(expmap, region, compact_K=K)
    assert b.alpha_K == pytest.approx(np.exp(-1.0), rel=0.05)
    assert b.n_in_K > 0


def test_qi_wide_map_alpha_zero():
    # a map dropping a coordinate cannot be expanding from below
    f = resolve_map("x + y")
    region = Box(np.array([-1.0, -1.0]), np.array([1.0, 1.0]))
    b = quasi_isometry_bounds(f, region)
    assert b.alpha_hat == 0.0


def test_path_battery_count_and_space(shear3):
    paths = path_battery(Euclidean(2), np.array([0.0, 0.0]), 2.0, n=12)
    assert len(paths) == 12
    kinds = {p.kind for p in paths}
    assert len(kinds) >= 2
    for p in paths:
        assert p.space.dim == 2
