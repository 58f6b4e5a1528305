"""Comparison functions: sn_κ, model Laplacians, weights, radii and volumes.

``sn_κ`` solves y'' + κy = 0, y(0) = 0, y'(0) = 1. All functions raise
DomainError past the first zero of the relevant sn instead of returning a
clamped or NaN value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, InvalidArgument
from .numkit import integrate

SERIES_CUTOFF = 1e-4


def domain_end(kappa: float) -> float:
    """First positive zero of sn_κ (inf when κ <= 0)."""
    return math.pi / math.sqrt(kappa) if kappa > 0 else math.inf


def _check_r(kappa: float, r: float) -> None:
    if not r > 0:
        raise DomainError(f"need r > 0, got {r}")
    if kappa > 0 and r >= domain_end(kappa):
        raise DomainError(f"r={r} is past the first zero π/√κ={domain_end(kappa):.6g} of sn_κ (κ={kappa})")


def sn(kappa: float, r: float) -> float:
    _check_r(kappa, r)
    if kappa > 0:
        a = math.sqrt(kappa)
        return math.sin(a * r) / a
    if kappa < 0:
        a = math.sqrt(-kappa)
        return math.sinh(a * r) / a
    return r


def sn_prime(kappa: float, r: float) -> float:
    _check_r(kappa, r)
    if kappa > 0:
        return math.cos(math.sqrt(kappa) * r)
    if kappa < 0:
        return math.cosh(math.sqrt(-kappa) * r)
    return 1.0


def snlog(kappa: float, r: float) -> float:
    """Logarithmic derivative sn'_κ(r) / sn_κ(r)."""
    _check_r(kappa, r)
    x = math.sqrt(abs(kappa)) * r
    if x < SERIES_CUTOFF:
        return 1.0 / r - kappa * r / 3.0 - kappa * kappa * r ** 3 / 45.0
    if kappa > 0:
        a = math.sqrt(kappa)
        return a / math.tan(a * r)
    a = math.sqrt(-kappa)
    return a / math.tanh(a * r)


def kahler_model_laplacian(n: int, c: float, r: float) -> float:
    """Laplacian of the distance function in M_c: 2(n-1) snlog(c/2) + snlog(2c)."""
    return 2 * (n - 1) * snlog(c / 2, r) + snlog(2 * c, r)


def riemannian_model_laplacian(m: float, K: float, r: float) -> float:
    """Riemannian bound (m-1) snlog(K, r) for Ric >= (m-1)K in real dimension m."""
    return (m - 1) * snlog(K, r)


def riemannian_bound_for_kahler(n: int, c: float, r: float) -> float:
    """Riemannian Laplacian bound implied by Ric >= (n+1)c on a Kähler n-fold."""
    return riemannian_model_laplacian(2 * n, (n + 1) * c / (2 * n - 1), r)


def alpha_weight(t: float, ell: float, c: float) -> float:
    """Ratio of squared normalized Jacobi profiles sn_{c/2} and sn_{2c} at t.

    Equal to ``(cos(√(c/2) ℓ) / cos(√(c/2) t))^2`` for c > 0, the cosh
    analogue for c < 0 and 1 for c = 0.
    """
    if not 0 < t <= ell:
        raise DomainError(f"need 0 < t <= ell, got t={t}, ell={ell}")
    _check_r(2 * c, ell)
    if c > 0:
        a = math.sqrt(c / 2)
        return (math.cos(a * ell) / math.cos(a * t)) ** 2
    if c < 0:
        a = math.sqrt(-c / 2)
        return (math.cosh(a * ell) / math.cosh(a * t)) ** 2
    return 1.0


def radius_C(k: int, n: int) -> float:
    """C(k, n) = √2 arccos(√(2(k-1)/(n-1))), so ℓ <= C/√c keeps α >= 2(k-1)/(n-1)."""
    if n < 2 or not 1 <= k < (n + 1) / 2:
        raise InvalidArgument(f"need 1 <= k < (n+1)/2, got k={k}, n={n}")
    return math.sqrt(2) * math.acos(math.sqrt(2 * (k - 1) / (n - 1)))


@dataclass(frozen=True)
class DiamConstants:
    nu: float
    bound: float


def diam_constants(k: int, c: float) -> DiamConstants:
    """ν = 2kc/(4k-3) and the diameter bound π/√ν."""
    if not c > 0:
        raise InvalidArgument(f"need c > 0, got {c}")
    if k < 1:
        raise InvalidArgument(f"need k >= 1, got {k}")
    nu = 2 * k * c / (4 * k - 3)
    return DiamConstants(nu, math.pi / math.sqrt(nu))


def myers_bound_riemannian(n: int) -> float:
    """Myers diameter bound for Ric >= (n+1) on a Kähler n-fold viewed as Riemannian."""
    if n < 1:
        raise InvalidArgument(f"need n >= 1, got {n}")
    return math.pi / math.sqrt(2) * math.sqrt((4 * n - 2) / (n + 1))


# --------------------------------------------------------------------------
# Volumes


def sphere_volume(n: int) -> float:
    """Volume of the unit sphere S^{2n-1}: 2π^n / (n-1)!."""
    return 2 * math.pi ** n / math.factorial(n - 1)


def area_element(n: int, c: float, r: float) -> float:
    """Area of the geodesic sphere of radius r in M_c; its log-derivative is the model Laplacian."""
    return sphere_volume(n) * sn(c / 2, r) ** (2 * n - 2) * sn(2 * c, r)


def _sn0(kappa: float, r: float) -> float:
    # sn including the endpoint zero, for integrands.
    if r <= 0:
        return 0.0
    if kappa > 0:
        a = math.sqrt(kappa)
        return math.sin(a * r) / a
    if kappa < 0:
        a = math.sqrt(-kappa)
        return math.sinh(a * r) / a
    return r


def ball_volume(n: int, c: float, delta: float, tol: float = 1e-11) -> float:
    """Volume of the geodesic ball of radius δ in M_c by quadrature of the area element."""
    if delta < 0:
        raise DomainError(f"need delta >= 0, got {delta}")
    if c > 0 and delta > math.pi / math.sqrt(2 * c) * (1 + 1e-15):
        raise DomainError(f"delta={delta} exceeds the diameter π/√(2c) of M_c")
    omega = sphere_volume(n)
    return integrate(lambda r: omega * _sn0(c / 2, r) ** (2 * n - 2) * _sn0(2 * c, r),
                     0.0, delta, tol)


def _disk_area(K: float, rho: float) -> float:
    # Geodesic disk of radius rho in the simply connected surface of curvature K.
    if K > 0:
        rho = min(rho, math.pi / math.sqrt(K))
        return 2 * math.pi * (1 - math.cos(math.sqrt(K) * rho)) / K
    if K < 0:
        return 2 * math.pi * (math.cosh(math.sqrt(-K) * rho) - 1) / (-K)
    return math.pi * rho * rho


def surface_product_ball_volume(K1: float, K2: float, delta: float, tol: float = 1e-11) -> float:
    """Ball volume in a product of two constant-curvature surfaces (curvatures K1, K2).

    Integrates the circle length of the first factor against the disk area of
    the second: ``∫ 2π sn_{K1}(ρ) D_{K2}(√(δ²-ρ²)) dρ`` over ρ < min(δ, π/√K1).
    """
    if delta < 0:
        raise DomainError(f"need delta >= 0, got {delta}")
    top = min(delta, domain_end(K1))
    return integrate(lambda rho: 2 * math.pi * _sn0(K1, rho)
                     * _disk_area(K2, math.sqrt(max(delta * delta - rho * rho, 0.0))),
                     0.0, top, tol)


@dataclass
class ComparisonCurve:
    grid: np.ndarray
    values: np.ndarray
    model: str
    bound: str
    non_increasing: bool | None = None
    meta: dict = field(default_factory=dict)


def bg_ratio(samples: Sequence[tuple], n: int, c: float, model: str = "samples",
             rtol: float = 1e-9) -> ComparisonCurve:
    """Bishop-Gromov ratio Vol(B(p,δ)) / Vol(B_{M_c}(δ)) and its monotonicity verdict.

    ``samples`` are (δ, volume) pairs with δ ascending. The verdict allows
    increases of at most ``rtol`` relative (quadrature noise).
    """
    pts = sorted((float(d), float(v)) for d, v in samples)
    if len(pts) < 2:
        raise InvalidArgument("need at least two samples")
    grid = np.array([d for d, _ in pts])
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise InvalidArgument("radii must be positive and distinct")
    ratio = np.array([v / ball_volume(n, c, d) for d, v in pts])
    steps = np.diff(ratio)
    verdict = bool(np.all(steps <= rtol * np.maximum(np.abs(ratio[:-1]), 1.0)))
    return ComparisonCurve(grid, ratio, model, f"M_c(n={n}, c={c})", verdict,
                           {"max_increase": float(steps.max())})
