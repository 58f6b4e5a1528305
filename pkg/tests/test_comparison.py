import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kahlercomp import comparison as cmp
from kahlercomp.errors import DomainError, InvalidArgument
from kahlercomp.numkit import integrate

SQ2 = math.sqrt(2)


def test_sn_examples():
    assert cmp.sn(0, 1.7) == 1.7
    assert cmp.sn(2, math.pi / (2 * SQ2)) == pytest.approx(1 / SQ2, abs=1e-15)
    assert cmp.sn(-1, 1.0) == pytest.approx(math.sinh(1.0))
    for r in (1e-6, 0.3, 5.0):
        assert cmp.snlog(0, r) == 1 / r


@pytest.mark.parametrize("kappa", [-2.0, -0.5, 0.5, 2.0])
def test_snlog_matches_sn_ratio(kappa):
    for r in np.linspace(0.01, 0.95 * min(cmp.domain_end(kappa), 3.0), 30):
        assert cmp.snlog(kappa, r) == pytest.approx(cmp.sn_prime(kappa, r) / cmp.sn(kappa, r), rel=1e-12)


def test_snlog_series_branch_is_continuous():
    for kappa in (2.0, -2.0):
        a = math.sqrt(abs(kappa))
        exact = (lambda r: a / math.tan(a * r)) if kappa > 0 else (lambda r: a / math.tanh(a * r))
        cut = 1e-4 / a
        for r in (cut * (1 - 1e-9), cut * (1 + 1e-9), cut / 10):
            assert cmp.snlog(kappa, r) == pytest.approx(exact(r), rel=1e-14)


def test_domain_errors():
    with pytest.raises(DomainError):
        cmp.sn(1.0, math.pi)
    with pytest.raises(DomainError):
        cmp.snlog(2.0, 0.0)
    with pytest.raises(DomainError):
        cmp.kahler_model_laplacian(2, 1.0, math.pi / SQ2)
    with pytest.raises(DomainError):
        cmp.snlog(1.0, -1.0)


@pytest.mark.parametrize("kappa", [-2.0, 0.0, 1.0, 3.0])
def test_snlog_strictly_decreasing(kappa):
    top = min(cmp.domain_end(kappa), 10.0) * 0.999
    vals = [cmp.snlog(kappa, r) for r in np.linspace(0.001, top, 1000)]
    assert np.all(np.diff(vals) < 0)


def test_kahler_model_laplacian_examples():
    for r in (0.2, 1.0, 2.0):
        assert cmp.kahler_model_laplacian(1, 1.0, r) == pytest.approx(SQ2 / math.tan(SQ2 * r), rel=1e-13)
        assert cmp.kahler_model_laplacian(3, 0.0, r) == pytest.approx(5 / r, rel=1e-15)
    vals = [cmp.kahler_model_laplacian(2, -1.0, r) for r in np.linspace(0.1, 10, 300)]
    assert np.all(np.diff(vals) < 0)
    assert cmp.kahler_model_laplacian(2, -1.0, 40.0) == pytest.approx(2 * SQ2, rel=1e-12)


def test_small_r_asymptotics():
    for n in (1, 2, 4):
        for c in (-1.0, 1.0):
            r = 1e-4
            assert abs(r * cmp.kahler_model_laplacian(n, c, r) - (2 * n - 1)) < 1e-6


def test_riemannian_model_laplacian():
    n = 3
    K = (n + 1) / (2 * n - 1)
    assert cmp.riemannian_bound_for_kahler(n, 1.0, 0.7) == pytest.approx((2 * n - 1) * cmp.snlog(K, 0.7))
    assert cmp.riemannian_model_laplacian(6, 0.0, 2.0) == pytest.approx(2.5)
    assert cmp.riemannian_model_laplacian(2, 1.0, 0.9) == pytest.approx(1 / math.tan(0.9))


@pytest.mark.parametrize("n", [2, 3, 5])
def test_kahler_bound_sharper_than_riemannian(n):
    for r in np.linspace(0.01, math.pi / SQ2 - 0.01, 500):
        assert cmp.kahler_model_laplacian(n, 1.0, r) < cmp.riemannian_bound_for_kahler(n, 1.0, r)


def test_kahler_equals_riemannian_at_n1():
    for r in np.linspace(0.05, 2.0, 20):
        assert cmp.kahler_model_laplacian(1, 1.0, r) == pytest.approx(cmp.riemannian_bound_for_kahler(1, 1.0, r))


@pytest.mark.parametrize("c", [-2.0, -1.0, 1.0, 2.0])
def test_alpha_weight_properties(c):
    ell = 0.9 * math.pi / math.sqrt(2 * abs(c))
    assert cmp.alpha_weight(ell, ell, c) == pytest.approx(1.0, abs=1e-15)
    ts = np.linspace(ell / 1000, ell, 1000)
    vals = np.array([cmp.alpha_weight(t, ell, c) for t in ts])
    ratio = np.array([(cmp.sn(c / 2, t) / cmp.sn(c / 2, ell)) ** 2 / (cmp.sn(2 * c, t) / cmp.sn(2 * c, ell)) ** 2
                      for t in ts])
    assert np.abs(vals - ratio).max() < 1e-10 * ratio.max()
    if c < 0:
        assert vals.min() >= 1 - 1e-15
    else:
        floor = math.cos(math.sqrt(c / 2) * ell) ** 2
        assert vals.min() >= floor - 1e-15
        assert np.all(np.diff(vals) >= -1e-15)


def test_alpha_weight_flat_and_domain():
    assert cmp.alpha_weight(0.3, 1.0, 0.0) == 1.0
    with pytest.raises(DomainError):
        cmp.alpha_weight(0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        cmp.alpha_weight(2.0, 1.0, 1.0)


def test_radius_C():
    for n in (2, 3, 7):
        assert cmp.radius_C(1, n) == pytest.approx(math.pi / SQ2)
    assert cmp.radius_C(2, 5) == pytest.approx(SQ2 * math.pi / 4)
    assert cmp.radius_C(2, 9) > cmp.radius_C(3, 9) > cmp.radius_C(4, 9)
    with pytest.raises(InvalidArgument):
        cmp.radius_C(3, 5)
    # the radius makes the α floor exactly 2(k-1)/(n-1)
    n, k, c = 9, 3, 2.0
    ell = cmp.radius_C(k, n) / math.sqrt(c)
    assert math.cos(math.sqrt(c / 2) * ell) ** 2 == pytest.approx(2 * (k - 1) / (n - 1))


def test_diam_constants():
    d = cmp.diam_constants(1, 1.0)
    assert d.nu == 2.0
    assert d.bound == math.pi / SQ2
    d2 = cmp.diam_constants(2, 0.75)
    assert d2.nu == pytest.approx(0.6)
    assert d2.bound == pytest.approx(math.pi * math.sqrt(5 / 3))
    assert d2.bound >= math.pi * math.sqrt(2 / 3)
    assert cmp.diam_constants(2, 1.0).nu > cmp.diam_constants(2, 0.5).nu
    with pytest.raises(InvalidArgument):
        cmp.diam_constants(1, 0.0)


def test_myers_bound():
    assert cmp.myers_bound_riemannian(1) == pytest.approx(math.pi / SQ2)
    assert cmp.myers_bound_riemannian(2) == pytest.approx(math.pi)
    for n in range(2, 10):
        assert cmp.myers_bound_riemannian(n) > math.pi / SQ2


def test_sphere_volume():
    assert cmp.sphere_volume(1) == pytest.approx(2 * math.pi)
    assert cmp.sphere_volume(2) == pytest.approx(2 * math.pi ** 2)
    assert cmp.sphere_volume(3) == pytest.approx(math.pi ** 3)


def test_ball_volume_examples():
    assert abs(cmp.ball_volume(1, 1.0, math.pi / SQ2) - 2 * math.pi) <= 1e-8
    assert abs(cmp.ball_volume(2, 1.0, math.pi / SQ2) - 2 * math.pi ** 2) <= 1e-7
    # Euclidean ball of real dimension 2n
    assert cmp.ball_volume(2, 0.0, 1.3) == pytest.approx(math.pi ** 2 / 2 * 1.3 ** 4, rel=1e-10)
    assert cmp.ball_volume(2, 1.0, 0.0) == 0.0
    with pytest.raises(DomainError):
        cmp.ball_volume(2, 1.0, 3.0)


def test_area_element_is_volume_derivative():
    for n, c in ((1, 1.0), (2, 1.0), (3, -1.0), (2, 0.5)):
        for d in (0.3, 1.0, 1.6):
            h = 1e-4
            dv = (cmp.ball_volume(n, c, d + h) - cmp.ball_volume(n, c, d - h)) / (2 * h)
            assert dv / cmp.area_element(n, c, d) == pytest.approx(1.0, abs=1e-6)


def test_area_log_derivative_is_model_laplacian():
    for n, c in ((2, 1.0), (3, -0.5)):
        for r in (0.4, 1.2):
            h = 1e-5
            dlog = (math.log(cmp.area_element(n, c, r + h)) - math.log(cmp.area_element(n, c, r - h))) / (2 * h)
            assert dlog == pytest.approx(cmp.kahler_model_laplacian(n, c, r), rel=1e-7)


def _polar_product_volume(K, delta):
    # independent oracle: polar coordinates on S^1 x S^1-type product of two round surfaces
    # Vol(B) = ∫_S ∫_0^{t(θ)} A(t, θ) dt dθ with A = t sn_K(t cos θ) sn_K(t sin θ) (2π)^2 / t ...
    # written as ∫∫ over (ρ1, ρ2) with ρ1^2 + ρ2^2 <= δ^2 of (2π)^2 sn_K(ρ1) sn_K(ρ2)
    top = math.pi / math.sqrt(K)

    def inner(r1):
        lim = min(math.sqrt(max(delta ** 2 - r1 ** 2, 0.0)), top)
        return cmp._sn0(K, r1) * integrate(lambda r2: cmp._sn0(K, r2), 0.0, lim, 1e-12)

    return (2 * math.pi) ** 2 * integrate(inner, 0.0, min(delta, top), 1e-11)


def test_surface_product_ball_volume_oracle():
    for delta in (0.4, 1.1, 2.0, math.pi * math.sqrt(2 / 3)):
        assert cmp.surface_product_ball_volume(3.0, 3.0, delta) == pytest.approx(
            _polar_product_volume(3.0, delta), rel=1e-9)
    total = cmp.surface_product_ball_volume(3.0, 3.0, math.pi * math.sqrt(2 / 3))
    assert total == pytest.approx((4 * math.pi / 3) ** 2, rel=1e-10)


def test_bg_ratio_model_against_itself():
    ds = np.linspace(0.1, 2.0, 20)
    curve = cmp.bg_ratio([(d, cmp.ball_volume(2, 1.0, d)) for d in ds], 2, 1.0)
    assert np.allclose(curve.values, 1.0, atol=1e-12)
    assert curve.non_increasing


def test_bg_ratio_product_example():
    diam = math.pi * math.sqrt(2 / 3)
    ds = np.linspace(0.05, diam, 50)
    samples = [(d, cmp.surface_product_ball_volume(3.0, 3.0, d)) for d in ds]
    curve = cmp.bg_ratio(samples, 2, 0.75)
    assert curve.non_increasing
    assert np.all(curve.values <= 1 + 1e-9)
    assert (4 * math.pi / 3) ** 2 <= 2 * math.pi ** 2 / 0.75 ** 2


def test_bg_ratio_detects_increase():
    ds = np.linspace(0.1, 1.0, 5)
    curve = cmp.bg_ratio([(d, 2 * cmp.ball_volume(1, 0.0, d) * d) for d in ds], 1, 0.0)
    assert not curve.non_increasing
    with pytest.raises(InvalidArgument):
        cmp.bg_ratio([(0.5, 1.0)], 1, 0.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(-4, 4), st.floats(0.01, 0.99))
def test_sn_solves_ode(kappa, frac):
    r = frac * min(cmp.domain_end(kappa), 4.0)
    h = 1e-4 * r
    second = (cmp._sn0(kappa, r + h) - 2 * cmp._sn0(kappa, r) + cmp._sn0(kappa, r - h)) / h ** 2
    scale = 1 + abs(kappa * cmp._sn0(kappa, r))
    assert abs(second + kappa * cmp._sn0(kappa, r)) < 1e-4 * scale / (frac ** 2)
