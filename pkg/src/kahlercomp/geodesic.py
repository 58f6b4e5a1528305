"""Hessian and Laplacian of the distance function along geodesics of catalog models.

The radial curvature of every catalog model is constant in a parallel frame,
so the Hessian of r splits into scalar Riccati equations
``s' = -s^2 - κ``, one per eigen-direction. They are integrated in the
regular variable ``w = s - 1/t`` (``w' = -2w/t - w^2 - κ``), which removes the
1/t singularity exactly; the start is ``t0 = 10h`` with ``w(t0) = -κ t0 / 3``.

Complex Hessians ``∂∂̄r(X, X̄)`` are expressed in an adapted unitary frame
whose last vector is ``E_r = (∇r - i J∇r)/√2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import comparison as cmp
from .curvature import (
    KahlerCurvature,
    Product,
    RadialProfile,
    Scaled,
    SpaceFormHBSC,
    as_space_form,
    check_mix,
    radial_profile,
)
from .errors import (
    AccuracyError,
    ConjugatePointError,
    DomainError,
    InvalidArgument,
    PreconditionUnmet,
)
from .numkit import rk4_solve
from .sym_op import is_k_semipositive

DEFAULT_STEPS = 2000
MAX_DOUBLINGS = 6
INEQ_TOL = 1e-8


# --------------------------------------------------------------------------
# Riccati integration


def _conjugate_radius(K: np.ndarray) -> np.ndarray:
    kmax = K.max(axis=1)
    return np.where(kmax > 0, math.pi / np.sqrt(np.maximum(kmax, 1e-300)), np.inf)


def default_steps(K: np.ndarray, rs: np.ndarray) -> np.ndarray:
    """Step counts giving h <= r/2000 and h <= (conjugate radius - r)/100.

    Counts are rounded up to DEFAULT_STEPS * 2^j (j <= MAX_DOUBLINGS) so radii
    can share a τ-grid.
    """
    d = _conjugate_radius(K) - rs
    need = np.where(np.isfinite(d), 100.0 * rs / np.maximum(d, 1e-300), 0.0)
    j = np.ceil(np.log2(np.maximum(need / DEFAULT_STEPS, 1.0)))
    return DEFAULT_STEPS * 2 ** np.minimum(j, MAX_DOUBLINGS).astype(int)


def riccati_grid(kappas, rs, steps: int | None = None) -> np.ndarray:
    """Riccati solutions at many radii in one pass.

    ``kappas`` has shape (J,) or (len(rs), J); row i is integrated to ``rs[i]``
    with step ``rs[i]/steps``. Time is rescaled as ``t = r τ`` so every radius
    shares the τ-grid, giving exactly the per-radius fixed-step scheme. With
    ``steps=None`` each row gets its default_steps count.
    """
    rs = np.asarray(rs, dtype=float).reshape(-1)
    K = np.asarray(kappas, dtype=float)
    K = np.broadcast_to(K, (rs.size, K.shape[-1])) if K.ndim == 1 else K
    if K.shape[0] != rs.size:
        raise InvalidArgument("kappas rows must match the number of radii")
    if np.any(~(rs > 0)):
        raise DomainError(f"need r > 0, got {rs.min()}")
    if steps is not None and steps < 100:
        raise InvalidArgument(f"need at least 100 steps, got {steps}")
    conj = _conjugate_radius(K)
    bad = rs >= conj
    if bad.any():
        i = int(np.argmax(bad))
        raise ConjugatePointError(
            f"r={rs[i]} reaches the conjugate radius π/√κ={conj[i]:.6g} (κ={K[i].max()})")
    counts = np.full(rs.size, steps) if steps is not None else default_steps(K, rs)
    out = np.empty(K.shape)
    for m in np.unique(counts):
        idx = counts == m
        out[idx] = _riccati_fixed(K[idx], rs[idx], int(m))
    return out


def _riccati_fixed(K: np.ndarray, rs: np.ndarray, steps: int) -> np.ndarray:
    R = rs[:, None]
    tau0 = 10.0 / steps
    t0 = R * tau0
    w0 = -K * t0 / 3.0

    def rhs(tau, w):
        return -2.0 * w / tau - R * (w * w + K)

    # dw/dτ = r dw/dt
    w = rk4_solve(rhs, tau0, w0, 1.0, 1.0 / steps)
    s = 1.0 / R + w
    if not np.all(np.isfinite(s)):
        raise ConjugatePointError("Riccati solution blew up before the requested radius")
    return s


def riccati_blocks(kappas, r: float, h: float | None = None) -> np.ndarray:
    """Solutions s(r) of ``s' = -s^2 - κ``, ``s ~ 1/t`` at 0, for each κ (vectorized)."""
    if not r > 0:
        raise DomainError(f"need r > 0, got {r}")
    K = np.asarray(kappas, dtype=float).reshape(-1)
    if h is None:
        return riccati_grid(K, [r])[0]
    if not 0 < h <= r / 100:
        raise InvalidArgument(f"step h={h} must satisfy 0 < h <= r/100")
    steps = max(100, math.ceil(r / h - 1e-9))
    return riccati_grid(K, [r], steps)[0]


@dataclass(frozen=True)
class RiccatiResult:
    eigenvalues: np.ndarray
    delta_r: float


def riccati_delta_r(profile: RadialProfile, r: float, h: float | None = None) -> RiccatiResult:
    """Hessian eigenvalues (with multiplicity) and Δr at radius r."""
    s = riccati_blocks(profile.kappas(), r, h)
    mult = profile.multiplicities()
    eig = np.repeat(s, mult)
    return RiccatiResult(np.sort(eig), float(np.dot(mult, s)))


def closed_delta_r(profile: RadialProfile, r: float) -> float:
    return float(sum(m * cmp.snlog(k, r) for m, k in profile.entries))


# --------------------------------------------------------------------------
# Adapted frames and complex Hessians


def _space_form_factors(model) -> list[SpaceFormHBSC]:
    if isinstance(model, (SpaceFormHBSC, Scaled)):
        return [as_space_form(model)]
    if isinstance(model, Product):
        return [as_space_form(f) for f in model.factors]
    raise InvalidArgument(f"no radial data for {type(model).__name__}")


@dataclass
class GeodesicFrame:
    """Geometry seen along one geodesic of a catalog model.

    ``mix`` is the speed of the geodesic in each factor (one entry per
    factor, ``sum(mix^2) = 1``); space forms use ``(1,)``.
    """

    model: object
    mix: np.ndarray
    factors: list = field(init=False)
    U: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.factors = _space_form_factors(self.model)
        m = len(self.factors)
        if self.mix is None:
            self.mix = np.full(m, 1 / math.sqrt(m))
        self.mix = check_mix(self.mix, m)
        n = self.n
        # factor i contributes the unit vector e_{u_i}; E_r = sum λ_i e_{u_i}
        self.anchor = np.cumsum([f.n for f in self.factors]) - 1
        er = np.zeros(n)
        er[self.anchor] = self.mix
        self.er = er
        v = er.copy()
        v[-1] -= 1.0
        if np.linalg.norm(v) < 1e-15:
            self.U = np.eye(n, dtype=complex)
        else:
            # Householder reflection sending e_{n-1} to E_r
            self.U = (np.eye(n) - 2.0 * np.outer(v, v) / np.dot(v, v)).astype(complex)

    @property
    def n(self) -> int:
        return sum(f.n for f in self.factors)

    def kappas(self) -> np.ndarray:
        """[J-direction κ per factor] + [totally real κ per factor] + [0]."""
        l2 = self.mix ** 2
        kj = [2 * f.c * x for f, x in zip(self.factors, l2)]
        kt = [f.c * x / 2 for f, x in zip(self.factors, l2)]
        return np.array(kj + kt + [0.0])

    def multiplicities(self) -> np.ndarray:
        """Real multiplicities matching kappas(); their sum is 2n - 1."""
        m = len(self.factors)
        return np.array([1] * m + [2 * f.n - 2 for f in self.factors] + [m - 1])

    def profile(self) -> RadialProfile:
        if len(self.factors) == 1 and not isinstance(self.model, Product):
            return radial_profile(self.model)
        return radial_profile(self.model, self.mix)

    def max_radius(self) -> float:
        """Distance at which the geodesic leaves the minimizing range."""
        out = math.inf
        for f, lam in zip(self.factors, self.mix):
            if f.c > 0 and lam > 0:
                out = min(out, math.pi / math.sqrt(2 * f.c) / lam)
        return out

    def tensor(self) -> KahlerCurvature:
        """Curvature components in the adapted frame (last vector E_r)."""
        T = self.model.tensor()
        return T.transform(self.U)

    def factor_hessian(self, s: np.ndarray) -> np.ndarray:
        """Complex Hessian in the factor frame from block values s = riccati(kappas())."""
        m = len(self.factors)
        n = self.n
        sj, st, s0 = s[:m], s[m:2 * m], s[-1]
        H = np.zeros((n, n), dtype=complex)
        off = 0
        for f, val in zip(self.factors, st):
            for j in range(off, off + f.n - 1):
                H[j, j] = val
            off += f.n
        a = self.anchor
        P = np.eye(m) - np.outer(self.mix, self.mix)
        H[np.ix_(a, a)] = 0.5 * (P * s0 + np.diag(sj))
        return H

    def complex_hessian(self, r: float, h: float | None = None, method: str = "riccati") -> np.ndarray:
        """``∂∂̄r(E_a, Ē_b)`` at distance r in the adapted frame."""
        if r >= self.max_radius():
            raise ConjugatePointError(f"r={r} is past the cut point {self.max_radius():.6g} of this geodesic")
        k = self.kappas()
        if method == "riccati":
            s = riccati_blocks(k, r, h)
        elif method == "closed":
            s = np.array([cmp.snlog(x, r) for x in k])
        else:
            raise InvalidArgument(f"unknown method {method!r}")
        H = self.factor_hessian(s)
        return self.U.conj().T @ H @ self.U


def geodesic_frame(model, mix=None) -> GeodesicFrame:
    return GeodesicFrame(model, None if mix is None else np.asarray(mix, dtype=float))


# --------------------------------------------------------------------------
# Index form


@dataclass(frozen=True, eq=False)
class FieldSample:
    """Complex vector field along [0, ℓ] sampled on a uniform grid in the parallel frame.

    ``values[i, a]`` is the E_a component at ``grid[i]``; ``derivs`` holds the
    covariant derivative (plain t-derivative in a parallel frame). When
    derivatives are not supplied they are taken by 5-point differences.
    """

    grid: np.ndarray
    values: np.ndarray
    derivs: np.ndarray | None = None

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if g.ndim != 1 or g.size < 5 or g.size % 2 == 0:
            raise InvalidArgument("grid must be 1-D with an odd number (>= 5) of points")
        if v.ndim != 2 or v.shape[0] != g.size:
            raise InvalidArgument("values must have shape (len(grid), n)")
        dg = np.diff(g)
        if g[0] != 0.0 or np.any(dg <= 0) or np.abs(dg - dg.mean()).max() > 1e-9 * dg.mean():
            raise InvalidArgument("grid must be uniform and start at 0")
        d = self.derivs
        d = _five_point(v, dg.mean()) if d is None else np.asarray(d, dtype=complex)
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "derivs", d)

    @property
    def ell(self) -> float:
        return float(self.grid[-1])

    @classmethod
    def from_function(cls, f: Callable, df: Callable, ell: float, points: int = 2001) -> "FieldSample":
        t = np.linspace(0.0, ell, points)
        return cls(t, np.array([f(x) for x in t]), np.array([df(x) for x in t]))


def _five_point(v: np.ndarray, h: float) -> np.ndarray:
    d = np.empty_like(v)
    d[2:-2] = (-v[4:] + 8 * v[3:-1] - 8 * v[1:-3] + v[:-4]) / (12 * h)
    for i in (0, 1):
        d[i] = (-25 * v[i] + 48 * v[i + 1] - 36 * v[i + 2] + 16 * v[i + 3] - 3 * v[i + 4]) / (12 * h)
        j = -1 - i
        d[j] = (25 * v[j] - 48 * v[j - 1] + 36 * v[j - 2] - 16 * v[j - 3] + 3 * v[j - 4]) / (12 * h)
    return d


def _simpson(y: np.ndarray, h: float) -> float:
    return float(h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum()))


def simpson_with_error(y: np.ndarray, h: float, target: float = 1e-8) -> float:
    """Composite Simpson with a Richardson error estimate against the half grid."""
    fine = _simpson(y, h)
    if (y.size - 1) % 4 == 0:
        coarse = _simpson(y[::2], 2 * h)
        err = abs(fine - coarse) / 15.0
        if err > target:
            raise AccuracyError(f"grid does not resolve the integrand (estimated error {err:.2e})")
    return fine


def _curvature_row(T: KahlerCurvature) -> np.ndarray:
    # M[i, j] = R(E_n, Ē_n, E_i, Ē_j) in the adapted frame
    return T.comp[-1, -1]


def index_form(T: KahlerCurvature, V: FieldSample) -> float:
    """``∫ |V'|^2 - ½ R(E_γ, Ē_γ, V, V̄) dt`` with T given in the adapted frame."""
    if V.values.shape[1] != T.n:
        raise InvalidArgument("field dimension does not match the tensor")
    M = _curvature_row(T)
    h = V.grid[1] - V.grid[0]
    kin = np.sum(np.abs(V.derivs) ** 2, axis=1)
    pot = np.einsum("ij,ti,tj->t", M, V.values, np.conj(V.values)).real
    return simpson_with_error(kin - 0.5 * pot, h)


def radial_energy(V: FieldSample) -> float:
    """``∫ |<V', E_γ>|^2 dt`` (last component in the adapted frame)."""
    h = V.grid[1] - V.grid[0]
    return simpson_with_error(np.abs(V.derivs[:, -1]) ** 2, h)


def hessian_upper_bound(frame: GeodesicFrame, X, V: FieldSample) -> float:
    """Index-form upper bound for ``∂∂̄r(X, X̄)`` at distance ℓ along the frame's geodesic.

    Requires ``V(0) = 0`` and ``V(ℓ) = X``.
    """
    X = np.asarray(X, dtype=complex)
    scale = max(1.0, float(np.abs(V.values).max()))
    if np.abs(V.values[0]).max() > 1e-10 * scale:
        raise InvalidArgument("field must vanish at t = 0")
    if np.abs(V.values[-1] - X).max() > 1e-10 * scale:
        raise InvalidArgument("field must end at X")
    T = frame.tensor()
    return index_form(T, V) - 0.5 * radial_energy(V)


def hessian_value(frame: GeodesicFrame, X, r: float, h: float | None = None) -> float:
    """Riccati-computed ``∂∂̄r(X, X̄)``."""
    X = np.asarray(X, dtype=complex)
    H = frame.complex_hessian(r, h)
    return float(np.real(np.conj(X) @ H @ X))


def jacobi_field(model, X, ell: float, points: int = 2001) -> FieldSample:
    """Canonical field ``x_a sn_{c/2}(t)/sn_{c/2}(ℓ)`` (a < n) and ``x_n sn_{2c}(t)/sn_{2c}(ℓ)``.

    This is the Jacobi-type field realizing equality in the index bound on a
    constant-HBSC model.
    """
    sf = as_space_form(model)
    X = np.asarray(X, dtype=complex)
    ka, kb = sf.c / 2, 2 * sf.c
    da, db = cmp.sn(ka, ell), cmp.sn(kb, ell)
    w = np.array([1 / da] * (sf.n - 1) + [1 / db], dtype=complex) * X
    ks = np.array([ka] * (sf.n - 1) + [kb])
    t = np.linspace(0.0, ell, points)
    S, C = _sn_cos(ks, t)
    return FieldSample(t, S * w, C * w)


def _sn_cos(ks: np.ndarray, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # sn_κ(t) and sn'_κ(t) on a grid, shape (len(t), len(ks))
    T = t[:, None]
    a = np.sqrt(np.abs(ks))[None, :]
    pos, neg = ks[None, :] > 0, ks[None, :] < 0
    safe = np.where(a > 0, a, 1.0)
    S = np.where(pos, np.sin(a * T) / safe, np.where(neg, np.sinh(a * T) / safe, T))
    C = np.where(pos, np.cos(a * T), np.where(neg, np.cosh(a * T), 1.0))
    return S, C


def perturbed_field(base: FieldSample, w, eps: float, beta: float = 0.0) -> FieldSample:
    """``V + eps (t/ℓ)(1 - t/ℓ)(1 + beta cos(π t/ℓ)) w``: same endpoints, generic interior."""
    t = base.grid
    ell = base.ell
    u = t / ell
    bump = u * (1 - u) * (1 + beta * np.cos(np.pi * u))
    dbump = ((1 - 2 * u) * (1 + beta * np.cos(np.pi * u))
             - u * (1 - u) * beta * np.pi * np.sin(np.pi * u)) / ell
    w = np.asarray(w, dtype=complex)
    return FieldSample(t, base.values + eps * np.outer(bump, w), base.derivs + eps * np.outer(dbump, w))


def coercivity_constant(c: float, ell: float) -> float:
    """μ with ``Q(W) >= μ ∫|W'|^2`` for fields vanishing at both ends (constant HBSC c)."""
    if c <= 0:
        return 0.5
    return min(1 - c * ell ** 2 / (2 * math.pi ** 2), 0.5 * (1 - 2 * c * ell ** 2 / math.pi ** 2))


@dataclass
class DominanceTrial:
    eps: float
    hessian: float
    bound: float
    sup_distance: float

    @property
    def gap(self) -> float:
        return self.bound - self.hessian


def index_dominance_trials(n: int, c: float, ell: float, trials: int, seed: int,
                           points: int = 2001) -> list[DominanceTrial]:
    """Random perturbations of the canonical field on M_c against the Riccati Hessian."""
    model = SpaceFormHBSC(n, c)
    frame = geodesic_frame(model)
    rng = np.random.default_rng(seed)
    H = frame.complex_hessian(ell)
    out = []
    for _ in range(trials):
        X = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        X /= np.linalg.norm(X)
        base = jacobi_field(model, X, ell, points)
        w = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        w /= np.linalg.norm(w)
        eps = float(10 ** rng.uniform(-4, 0))
        beta = float(rng.uniform(-0.9, 0.9))
        V = perturbed_field(base, w, eps, beta)
        hv = float(np.real(np.conj(X) @ H @ X))
        hb = hessian_upper_bound(frame, X, V)
        dist = float(np.abs(V.values - base.values).max())
        out.append(DominanceTrial(eps, hv, hb, dist))
    return out


# --------------------------------------------------------------------------
# Product manifolds of CP^1 factors


def fr(x: float, r: float) -> float:
    """f_r(x) = sn'_x(r)/sn_x(r)."""
    return cmp.snlog(x, r)


def product_laplacian(hsc_list: Sequence[float], r: float, lam: Sequence[float]) -> float:
    """Δr on a product of round CP^1 factors with HSC h_i along a geodesic with mix λ.

    ``Σ f_r(h_i λ_i^2) + (n-1) f_r(0)``.
    """
    hs = [float(x) for x in hsc_list]
    lam = check_mix(lam, len(hs))
    total = (len(hs) - 1) * fr(0.0, r)
    for hv, l in zip(hs, lam):
        x = hv * l * l
        if x > 0 and r * math.sqrt(x) >= math.pi:
            raise DomainError(f"r={r} is past the conjugate radius for curvature {x}")
        total += fr(x, r)
    return total


def product_laplacian_max(n: int, r: float, hsc: float | None = None) -> float:
    """Maximum of Δr over the distance sphere: n f_r(h/n) + (n-1) f_r(0), h = n+1 by default."""
    h = n + 1 if hsc is None else hsc
    return n * fr(h / n, r) + (n - 1) * fr(0.0, r)


def fr_second_derivative(x: float, r: float) -> float:
    """Closed-form d²f_r/dx² for 0 < x < π²/r²."""
    if not 0 < x < (math.pi / r) ** 2:
        raise DomainError(f"need 0 < x < π²/r², got x={x}")
    q = math.sqrt(x)
    th = q * r
    s, c = math.sin(th), math.cos(th)
    num = 2 * x * r * r * c - th * s - s * s * c
    return num / (4 * q ** 3 * s ** 3)


def _sin_minus(x: float) -> float:
    # x - sin x without cancellation
    if x > 0.5:
        return x - math.sin(x)
    term, total, k = x ** 3 / 6, 0.0, 1
    while abs(term) > 1e-18 * abs(total) or k < 3:
        total += term
        term *= -x * x / ((2 * k + 2) * (2 * k + 3))
        k += 1
    return total


def _sin_minus_xcos(x: float) -> float:
    # sin x - x cos x = Σ_{k>=1} (-1)^{k+1} 2k x^{2k+1}/(2k+1)!
    if x > 0.5:
        return math.sin(x) - x * math.cos(x)
    total = 0.0
    k = 1
    fact = 6.0  # (2k+1)!
    while True:
        term = (-1) ** (k + 1) * 2 * k * x ** (2 * k + 1) / fact
        total += term
        if abs(term) < 1e-18 * abs(total):
            return total
        fact *= (2 * k + 2) * (2 * k + 3)
        k += 1


def concavity_phi(theta: float) -> float:
    """φ(θ) = 2θ² - θ tan θ - sin²θ, evaluated stably near 0.

    Rewritten as ``(θ - sinθ)(θ + sinθ) - θ (tanθ - θ)``.
    """
    if not 0 < theta < math.pi / 2:
        raise DomainError(f"need 0 < θ < π/2, got {theta}")
    # tanθ - θ = (sinθ - θcosθ)/cosθ
    tan_minus = _sin_minus_xcos(theta) / math.cos(theta)
    return _sin_minus(theta) * (theta + math.sin(theta)) - theta * tan_minus


def fr_concavity_check(r: float, points: int = 1000, tol: float = 1e-9) -> bool:
    """Concavity of x -> f_r(x) on (0, π²/r²): second differences and the φ <= 0 criterion."""
    if not r > 0:
        raise DomainError(f"need r > 0, got {r}")
    top = (math.pi / r) ** 2
    xs = np.linspace(0.0, top, points + 2)[1:-1]
    h = xs[1] - xs[0]
    f = np.array([fr(x, r) for x in xs])
    second = (f[2:] - 2 * f[1:-1] + f[:-2]) / h ** 2
    scale = np.maximum(np.abs(f[1:-1]), 1.0) / h ** 2
    ok_fd = bool(np.all(second <= tol * scale))
    thetas = np.linspace(0.0, math.pi / 2, points + 2)[1:-1]
    ok_phi = all(concavity_phi(t) <= 0 for t in thetas)
    return ok_fd and ok_phi


# --------------------------------------------------------------------------
# Comparison sweeps


BOUNDS = ("kahler", "riemannian")


@dataclass
class Hypothesis:
    route: str
    radius: float = math.inf
    detail: dict = field(default_factory=dict)


def kahler_bound_hypotheses(T: KahlerCurvature, c: float, k: int | None = None,
                            tol: float = INEQ_TOL) -> Hypothesis:
    """Which theorem (if any) licenses the Kähler model bound with parameter c for T.

    Routes tried in order:

    * ``hsc-ric``: c > 0, HSC >= 2c and Ric >= (n+1)c;
    * ``kpos``: c <= 0, S - 2c id k-semipositive with k <= (n+1)/2;
    * ``kpos-ball``: c > 0, k-semipositive with k < (n+1)/2, valid for r <= C(k,n)/√c.
    """
    n = T.n
    ric = T.ricci_min_eigenvalue()
    detail = {"ricci_min": ric}
    if c > 0:
        hmin = T.hsc_min()
        detail["hsc_min"] = hmin
        if hmin >= 2 * c - tol and ric >= (n + 1) * c - tol:
            return Hypothesis("hsc-ric", math.inf, detail)
    ks = [k] if k is not None else list(range(1, n + 1))
    for kk in ks:
        if kk < 1 or kk > n * (n + 1) // 2:
            continue
        if c <= 0 and kk <= (n + 1) / 2 and is_k_semipositive(T, c, kk):
            return Hypothesis("kpos", math.inf, dict(detail, k=kk))
        if c > 0 and n >= 2 and kk < (n + 1) / 2 and is_k_semipositive(T, c, kk):
            return Hypothesis("kpos-ball", cmp.radius_C(kk, n) / math.sqrt(c), dict(detail, k=kk))
    raise PreconditionUnmet(f"no comparison theorem applies with c={c}: {detail}")


def riemannian_bound_hypotheses(T: KahlerCurvature, c: float, tol: float = INEQ_TOL) -> Hypothesis:
    ric = T.ricci_min_eigenvalue()
    if ric >= (T.n + 1) * c - tol:
        return Hypothesis("ricci", math.inf, {"ricci_min": ric})
    raise PreconditionUnmet(f"Ric_min={ric} < (n+1)c={(T.n + 1) * c}")


def bound_value(bound: str, n: int, c: float, r: float) -> float:
    if bound == "kahler":
        return cmp.kahler_model_laplacian(n, c, r)
    if bound == "riemannian":
        return cmp.riemannian_bound_for_kahler(n, c, r)
    raise InvalidArgument(f"unknown bound {bound!r}; choose from {BOUNDS}")


def default_mixes(m: int, count: int, seed: int) -> list[np.ndarray]:
    """Symmetric mix, coordinate mixes and seeded random mixes (λ² uniform on the simplex)."""
    if m == 1:
        return [np.array([1.0])]
    mixes = [np.full(m, 1 / math.sqrt(m))]
    mixes += [np.eye(m)[i] for i in range(m)]
    rng = np.random.default_rng(seed)
    for x in rng.dirichlet(np.ones(m), size=count):
        lam = np.sqrt(x)
        mixes.append(lam / np.linalg.norm(lam))
    return mixes


@dataclass
class SweepRow:
    r: float
    actual: float
    bound: float
    mix: tuple = ()

    @property
    def gap(self) -> float:
        return self.bound - self.actual


@dataclass
class SweepReport:
    rows: list
    tol: float
    expect: str = "holds"
    hypothesis: Hypothesis | None = None
    seed: int = 0

    @property
    def min_gap(self) -> float:
        return min(row.gap for row in self.rows)

    @property
    def violations(self) -> list:
        return [row for row in self.rows if row.gap < -self.tol]

    @property
    def worst(self) -> SweepRow:
        return min(self.rows, key=lambda row: row.gap)

    @property
    def passed(self) -> bool:
        if self.expect == "holds":
            return not self.violations
        # counterexample mode: the bound must fail somewhere and hold strictly nowhere
        return bool(self.violations) and all(row.gap <= self.tol for row in self.rows)

    def reproducer(self) -> str:
        w = self.worst
        return f"seed={self.seed} r={w.r!r} mix={list(w.mix)} gap={w.gap:.3e}"


def model_laplacian_rows(model, rs: Sequence[float], mixes=None, seed: int = 0,
                         method: str = "riccati", random_mixes: int = 32) -> list[tuple]:
    """Largest Δr over the supplied (or default) geodesic mixes at each radius.

    Returns (r, Δr, mix) triples. Mixes whose geodesic is past its cut point
    at radius r are skipped.
    """
    factors = _space_form_factors(model)
    if mixes is None:
        mixes = default_mixes(len(factors), random_mixes, seed)
    frames = [geodesic_frame(model, mx) for mx in mixes]
    out = []
    pending = []
    for r in rs:
        live = [f for f in frames if r < f.max_radius()]
        if not live:
            raise DomainError(f"no admissible geodesic reaches r={r}")
        if method == "closed":
            vals = [closed_delta_r(f.profile(), r) for f in live]
        elif method != "riccati":
            raise InvalidArgument(f"unknown method {method!r}")
        else:
            vals = None
        pending.append((float(r), live, vals))
    if method == "riccati":
        pairs = [(r, f) for r, live, _ in pending for f in live]
        S = riccati_grid(np.array([f.kappas() for _, f in pairs]), [r for r, _ in pairs])
        pos = 0
        for idx, (r, live, _) in enumerate(pending):
            vals = [float(np.dot(f.multiplicities(), S[pos + j])) for j, f in enumerate(live)]
            pending[idx] = (r, live, vals)
            pos += len(live)
    for r, live, vals in pending:
        i = int(np.argmax(vals))
        out.append((float(r), vals[i], tuple(float(x) for x in live[i].mix)))
    return out


def comparison_sweep(model, bound: str, rs: Sequence[float], c: float, k: int | None = None,
                     mixes=None, seed: int = 0, tol: float = INEQ_TOL, expect: str = "holds",
                     method: str = "riccati") -> SweepReport:
    """Compare the model's Δr with a named Laplacian bound on a radius grid.

    With ``expect="holds"`` the bound's curvature hypotheses are verified
    first and the sweep is refused (PreconditionUnmet) if they fail. With
    ``expect="violation"`` the sweep runs as a counterexample search.
    """
    if expect not in ("holds", "violation"):
        raise InvalidArgument(f"expect must be 'holds' or 'violation', got {expect!r}")
    T = model.tensor()
    n = T.n
    hyp = None
    if expect == "holds":
        if bound == "kahler":
            hyp = kahler_bound_hypotheses(T, c, k)
        elif bound == "riemannian":
            hyp = riemannian_bound_hypotheses(T, c)
        else:
            raise InvalidArgument(f"unknown bound {bound!r}; choose from {BOUNDS}")
        if max(rs) > hyp.radius:
            raise PreconditionUnmet(f"grid reaches r={max(rs)} beyond the licensed radius {hyp.radius:.6g}")
    rows = [SweepRow(r, a, bound_value(bound, n, c, r), mx)
            for r, a, mx in model_laplacian_rows(model, rs, mixes, seed, method)]
    return SweepReport(rows, tol, expect, hyp, seed)


@dataclass
class KHessianRow:
    r: float
    actual: float
    smallest: float
    bound: float
    mix: tuple = ()

    @property
    def gap(self) -> float:
        return self.bound - self.actual


def k_hessian_check(model, k: int, rs: Sequence[float], c: float, mixes=None, seed: int = 0,
                    tol: float = INEQ_TOL) -> SweepReport:
    """Partial traces of ∂∂̄r over k-frames orthogonal to E_r against k·snlog(c/2, r).

    ``actual`` is the largest such trace (sum of the k largest eigenvalues of
    the Hessian compressed to E_r^⊥), the binding case of the inequality;
    ``smallest`` is the k smallest sum.
    """
    T = model.tensor()
    n = T.n
    if not 1 <= k < n:
        raise PreconditionUnmet(f"need 1 <= k < n, got k={k}, n={n}")
    if not is_k_semipositive(T, c, k):
        raise PreconditionUnmet(f"S - 2c id is not {k}-semipositive for c={c}")
    factors = _space_form_factors(model)
    if mixes is None:
        mixes = default_mixes(len(factors), 16, seed)
    frames = [geodesic_frame(model, mx) for mx in mixes]
    rows = []
    for r in rs:
        bound = k * cmp.snlog(c / 2, r)
        for f in frames:
            if r >= f.max_radius():
                continue
            H = f.complex_hessian(r)
            w = np.linalg.eigvalsh(H[:-1, :-1])
            rows.append(KHessianRow(float(r), float(w[-k:].sum()), float(w[:k].sum()), bound,
                                    tuple(float(x) for x in f.mix)))
    return SweepReport(rows, tol, "holds", Hypothesis("kpos", detail={"k": k}), seed)
