"""Exact Bernoulli numbers and the Laurent series of the product-versus-model gap.

The gap between the largest Laplacian of the distance function on
``CP^1 x CP^1`` (each factor of holomorphic sectional curvature 3) and the
constant-HBSC model with c = 1 is

    g(r) = 2 f(3/2) + 1/r - 2 f(1/2) - f(2),   f(κ) = sn'_κ(r)/sn_κ(r),

and expanding each ``√κ cot(√κ r)`` in Bernoulli numbers gives

    g(r) = Σ_k c_k r^(2k-1),   c_k = (-1)^k 2^(2k) B_2k T_k / (2k)!,
    T_k = (3^k - 1)/2^(k-1) - 2^k.

T_1 = T_2 = 0 and T_k < 0 for k >= 3. Since (-1)^k B_2k < 0 for every k >= 1,
each c_k with k >= 3 is positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from math import comb

from . import comparison as cmp
from .errors import DomainError, InvalidArgument
from .geodesic import _sin_minus_xcos
from .numkit import BigRational

MAX_K = 200
RADIUS = math.pi / math.sqrt(2)
EPS = 2.0 ** -52


@dataclass(frozen=True)
class BernoulliTable:
    values: tuple

    def __getitem__(self, m: int) -> BigRational:
        return self.values[m]

    def __len__(self) -> int:
        return len(self.values)


@lru_cache(maxsize=None)
def _bernoulli_upto(m: int) -> tuple:
    B = [BigRational(1)]
    for k in range(1, m + 1):
        acc = sum((comb(k + 1, j) * B[j] for j in range(k)), BigRational(0))
        B.append(-acc / (k + 1))
    return tuple(B)


def bernoulli(upto: int) -> BernoulliTable:
    """B_0..B_upto from ``Σ_{j<=m} C(m+1, j) B_j = 0`` (convention B_1 = -1/2)."""
    if upto < 0 or upto > 2 * MAX_K:
        raise InvalidArgument(f"need 0 <= upto <= {2 * MAX_K}, got {upto}")
    return BernoulliTable(_bernoulli_upto(upto))


def bracket(k: int) -> BigRational:
    """T_k = (3^k - 1)/2^(k-1) - 2^k, exactly."""
    if k < 1:
        raise InvalidArgument(f"need k >= 1, got {k}")
    return BigRational(3 ** k - 1, 2 ** (k - 1)) - 2 ** k


def coefficient(k: int) -> BigRational:
    """c_k, the coefficient of r^(2k-1) in g."""
    B = bernoulli(2 * k)[2 * k]
    return BigRational((-1) ** k * 2 ** (2 * k)) * B * bracket(k) / math.factorial(2 * k)


@dataclass(frozen=True)
class GSeries:
    K: int
    coeffs: tuple  # coeffs[k-1] = c_k
    radius: float = RADIUS

    def c(self, k: int) -> BigRational:
        return self.coeffs[k - 1]


def g_coefficients(K: int) -> GSeries:
    if not 1 <= K <= MAX_K:
        raise InvalidArgument(f"need 1 <= K <= {MAX_K}, got {K}")
    B = bernoulli(2 * K)
    coeffs = tuple(
        BigRational((-1) ** k * 2 ** (2 * k)) * B[2 * k] * bracket(k) / math.factorial(2 * k)
        for k in range(1, K + 1)
    )
    return GSeries(K, coeffs)


@dataclass(frozen=True)
class SeriesValue:
    value: float
    tail: float
    rounding: float

    @property
    def bound(self) -> float:
        """Total error allowance: truncation tail plus floating-point rounding."""
        return self.tail + self.rounding


def tail_bound(r: float, K: int) -> float:
    """Bound on ``Σ_{k>K} |c_k| r^(2k-1)``.

    Uses ``|B_2k|/(2k)! <= 4/(2π)^(2k) / (1 - 2^(1-2k))`` and ``|T_k| < 2^k``,
    so each term is at most ``4 q^k / (r (1 - 2^(1-2k)))`` with
    ``q = 2 r^2 / π^2 < 1``; the remainder is a geometric sum.
    """
    q = 2 * r * r / math.pi ** 2
    return 4.0 / (1 - 2.0 ** (-2 * K - 1)) * q ** (K + 1) / ((1 - q) * r)


def term_bound(r: float, k: int) -> float:
    q = 2 * r * r / math.pi ** 2
    return 4.0 * q ** k / (r * (1 - 2.0 ** (1 - 2 * k)))


def _check_r(r: float) -> None:
    if not 0 < r < RADIUS:
        raise DomainError(f"need 0 < r < π/√2, got {r}")


def g_eval_series(r: float, K: int = 40) -> SeriesValue:
    """Partial sum through k = K with its tail and rounding allowances."""
    _check_r(r)
    if K < 3:
        raise InvalidArgument(f"need K >= 3, got {K}")
    gs = g_coefficients(K)
    terms = [float(ck) * r ** (2 * k - 1) for k, ck in enumerate(gs.coeffs, start=1)]
    total = math.fsum(terms)
    rounding = 4 * (K + 2) * EPS * math.fsum(abs(t) for t in terms)
    return SeriesValue(total, tail_bound(r, K), rounding)


_CLOSED_TERMS = ((2.0, 1.5), (-2.0, 0.5), (-1.0, 2.0))


def _snlog_minus_pole(kappa: float, r: float) -> float:
    # sn'_κ/sn_κ - 1/r = -(sin x - x cos x)/(r sin x), x = √κ r, without cancellation
    x = math.sqrt(kappa) * r
    return -_sin_minus_xcos(x) / (r * math.sin(x))


def g_eval_closed(r: float) -> float:
    """g via logarithmic derivatives of sn.

    The 1/r poles cancel exactly (2 - 2 - 1 + 1 = 0), so each term is taken
    with its pole removed to avoid losing g ~ r^5/315 to cancellation.
    """
    _check_r(r)
    return math.fsum(a * _snlog_minus_pole(kappa, r) for a, kappa in _CLOSED_TERMS)


def closed_rounding(r: float) -> float:
    """Floating-point error allowance for g_eval_closed."""
    total = 0.0
    for a, kappa in _CLOSED_TERMS:
        x = math.sqrt(kappa) * r
        cond = 1 + x / abs(math.sin(x) * math.cos(x))
        total += abs(a * _snlog_minus_pole(kappa, r)) * cond
    return 16 * EPS * total


@dataclass(frozen=True)
class SeriesRow:
    k: int
    T: BigRational
    c: BigRational

    @property
    def sign(self) -> int:
        return (self.c > 0) - (self.c < 0)


def series_table(K: int) -> list[SeriesRow]:
    gs = g_coefficients(K)
    return [SeriesRow(k, bracket(k), gs.c(k)) for k in range(1, K + 1)]


def positivity_verdict(K: int) -> bool:
    """True iff c_1 = c_2 = 0 and c_k > 0 for 3 <= k <= K."""
    rows = series_table(K)
    return all(row.c == 0 if row.k <= 2 else row.c > 0 for row in rows)
