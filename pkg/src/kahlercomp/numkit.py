"""Small numerical kernels used throughout the package.

Everything here is a pure function of its inputs. The Hermitian eigensolver
is a cyclic complex Jacobi method that works on stacks of matrices at once,
which is what makes the randomized curvature sweeps affordable.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import AccuracyError, ContractError, DomainError, InvalidArgument

# Exact rational arithmetic: Fraction already keeps denominator > 0 and
# numerator/denominator coprime after every operation.
BigRational = Fraction

HERMITIAN_RTOL = 1e-12


def check_hermitian(A: np.ndarray, rtol: float = HERMITIAN_RTOL) -> None:
    """Raise ContractError unless every matrix in the stack is Hermitian."""
    A = np.asarray(A)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise ContractError(f"expected square matrices, got shape {A.shape}")
    dev = np.abs(A - np.conj(np.swapaxes(A, -1, -2))).max(axis=(-2, -1))
    scale = np.maximum(np.abs(A).max(axis=(-2, -1)), 1.0)
    if np.any(dev > rtol * scale):
        raise ContractError(f"matrix is not Hermitian (max asymmetry {float(np.max(dev)):.3e})")


def hermitian_eigen(A, tol: float = 1e-15, max_sweeps: int = 60, check: bool = True):
    """Eigen-decomposition of a Hermitian matrix (or a stack of them).

    Cyclic Jacobi: every off-diagonal pair (p, q) is annihilated by a complex
    rotation, sweeping until the off-diagonal mass is below ``tol * ||A||_F``.
    Pairs are scheduled in round-robin rounds of disjoint pairs, and each
    round is applied to the whole stack at once.

    Parameters
    ----------
    A : array_like, shape (N, N) or (B, N, N)
        Hermitian input.
    tol : float
        Relative off-diagonal Frobenius threshold for convergence.

    Returns
    -------
    w : ndarray, shape (N,) or (B, N)
        Eigenvalues in ascending order.
    V : ndarray, shape (N, N) or (B, N, N)
        Unitary matrix of eigenvectors (columns), ``A V = V diag(w)``.
    """
    A = np.asarray(A)
    if check:
        check_hermitian(A)
    single = A.ndim == 2
    M = np.array(A, dtype=complex, copy=True).reshape((-1,) + A.shape[-2:])
    M = 0.5 * (M + np.conj(np.swapaxes(M, -1, -2)))
    B, N, _ = M.shape
    V = np.broadcast_to(np.eye(N, dtype=complex), (B, N, N)).copy()

    norms = np.sqrt(np.sum(np.abs(M) ** 2, axis=(1, 2)))
    offmask = ~np.eye(N, dtype=bool)
    rounds = _round_robin(N)

    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(M[:, offmask]) ** 2, axis=1)) if N > 1 else np.zeros(B)
        if np.all(off <= tol * np.maximum(norms, np.finfo(float).tiny)):
            break
        for P, Q in rounds:
            # rotations on disjoint pairs commute, so a whole round is applied at once
            beta = M[:, P, Q]
            b = np.abs(beta)
            active = b > 1e-300
            if not active.any():
                continue
            bs = np.where(active, b, 1.0)
            phase = np.where(active, beta / bs, 1.0)  # e^{i phi}
            alpha = M[:, P, P].real
            gamma = M[:, Q, Q].real
            tau = (gamma - alpha) / (2.0 * bs)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            cph = np.conj(phase)  # e^{-i phi}
            c_, s_, ph_, cph_ = c[:, None, :], s[:, None, :], phase[:, None, :], cph[:, None, :]

            colp = M[:, :, P]
            colq = M[:, :, Q]
            M[:, :, P] = c_ * colp - s_ * cph_ * colq
            M[:, :, Q] = s_ * colp + c_ * cph_ * colq
            rowp = M[:, P, :]
            rowq = M[:, Q, :]
            M[:, P, :] = c[:, :, None] * rowp - (s * phase)[:, :, None] * rowq
            M[:, Q, :] = s[:, :, None] * rowp + (c * phase)[:, :, None] * rowq
            M[:, P, Q] = 0.0
            M[:, Q, P] = 0.0
            M[:, P, P] = M[:, P, P].real
            M[:, Q, Q] = M[:, Q, Q].real

            vp = V[:, :, P]
            vq = V[:, :, Q]
            V[:, :, P] = c_ * vp - s_ * cph_ * vq
            V[:, :, Q] = s_ * vp + c_ * cph_ * vq
    else:
        raise AccuracyError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")

    w = np.real(np.diagonal(M, axis1=1, axis2=2)).copy()
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    V = np.take_along_axis(V, order[:, None, :], axis=2)
    if single:
        return w[0], V[0]
    return w, V


def _round_robin(N: int) -> list:
    # Circle-method schedule: N-1 (or N) rounds of disjoint pairs covering every pair once.
    players = list(range(N)) + ([-1] if N % 2 else [])
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p >= 0 and q >= 0]
        if pairs:
            rounds.append((np.array([p for p, _ in pairs]), np.array([q for _, q in pairs])))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def eigvalsh(A, check: bool = True) -> np.ndarray:
    """Ascending eigenvalues only (same solver)."""
    return hermitian_eigen(A, check=check)[0]


def _gram_schmidt(Z: np.ndarray) -> np.ndarray:
    # Modified Gram-Schmidt with one re-orthogonalization pass, on stacked columns.
    Q = Z.copy()
    n = Q.shape[-1]
    for j in range(n):
        v = Q[..., :, j]
        for _ in range(2):
            if j:
                prev = Q[..., :, :j]
                coef = np.einsum("...ij,...i->...j", np.conj(prev), v)
                v = v - np.einsum("...ij,...j->...i", prev, coef)
        nrm = np.linalg.norm(v, axis=-1)
        if np.any(nrm < 1e-12):
            raise AccuracyError("rank-deficient Gaussian sample in Gram-Schmidt")
        Q[..., :, j] = v / nrm[..., None]
    return Q


def random_unitaries(n: int, count: int, seed: int) -> np.ndarray:
    """Stack of ``count`` seeded random unitary n x n matrices, shape (count, n, n)."""
    if n < 1:
        raise InvalidArgument(f"dimension must be >= 1, got {n}")
    if count < 1:
        raise InvalidArgument(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    Z = (rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n))) / math.sqrt(2)
    return _gram_schmidt(Z)


def random_unitary(n: int, seed: int) -> np.ndarray:
    """Seeded random unitary n x n matrix (Gram-Schmidt of a complex Gaussian)."""
    return random_unitaries(n, 1, seed)[0]


def integrate(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10,
              max_evals: int = 2_000_000) -> float:
    """Adaptive Simpson quadrature of a real function on [a, b]."""
    if not (math.isfinite(a) and math.isfinite(b)) or a > b:
        raise DomainError(f"need finite a <= b, got [{a}, {b}]")
    if a == b:
        return 0.0
    evals = 0

    def F(x):
        nonlocal evals
        evals += 1
        y = float(f(x))
        if not math.isfinite(y):
            raise DomainError(f"integrand not finite at x={x!r}")
        return y

    panels = 4
    edges = np.linspace(a, b, panels + 1)
    total = 0.0
    stack = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (lo + hi)
        flo, fmid, fhi = F(lo), F(mid), F(hi)
        whole = (hi - lo) / 6.0 * (flo + 4 * fmid + fhi)
        stack.append((lo, hi, flo, fmid, fhi, whole, tol / panels, 0))
    while stack:
        lo, hi, flo, fmid, fhi, whole, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = F(lm), F(rm)
        left = (mid - lo) / 6.0 * (flo + 4 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4 * frm + fhi)
        delta = left + right - whole
        if abs(delta) <= 15 * eps or depth >= 60 or hi - lo < 1e-14 * max(1.0, abs(b - a)):
            total += left + right + delta / 15.0
        else:
            stack.append((lo, mid, flo, flm, fmid, left, eps / 2, depth + 1))
            stack.append((mid, hi, fmid, frm, fhi, right, eps / 2, depth + 1))
        if evals > max_evals:
            raise AccuracyError(f"quadrature exceeded {max_evals} evaluations on [{a}, {b}]")
    return total


def rk4_solve(f: Callable[[float, np.ndarray], np.ndarray], t0: float, y0, t1: float,
              h: float) -> np.ndarray:
    """Classical fixed-step RK4 from t0 to t1.

    The step is shrunk to ``(t1 - t0) / ceil((t1 - t0) / h)`` so the last step
    lands exactly on t1.
    """
    if h <= 0:
        raise InvalidArgument(f"step must be positive, got {h}")
    y = np.asarray(y0, dtype=float).copy()
    span = t1 - t0
    if span <= 0:
        return y
    steps = max(1, math.ceil(span / h - 1e-9))
    dt = span / steps
    t = t0
    for i in range(steps):
        k1 = f(t, y)
        k2 = f(t + 0.5 * dt, y + 0.5 * dt * k1)
        k3 = f(t + 0.5 * dt, y + 0.5 * dt * k2)
        k4 = f(t + dt, y + dt * k3)
        y = y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t0 + (i + 1) * dt
    return y
