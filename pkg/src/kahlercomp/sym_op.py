"""The symmetrized curvature operator on Sym^2 T^{1,0}.

Matrix elements are taken in the orthonormal basis ``E_i ⊗ E_i`` and
``(E_i ⊗ E_k + E_k ⊗ E_i)/√2`` (i < k), so the eigenvalues of the matrix are
the eigenvalues λ_1 <= ... <= λ_N (N = n(n+1)/2) of the operator itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .curvature import KahlerCurvature, _symmetrize, const_hbsc
from .errors import InvalidArgument, PreconditionUnmet
from .numkit import check_hermitian, hermitian_eigen, random_unitaries, random_unitary


@dataclass(frozen=True)
class SymBasis:
    """Ordered weighted basis of Sym^2: pairs (i, k) with i <= k, row-major."""

    n: int
    pairs: tuple = field(init=False)

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgument(f"n must be >= 1, got {self.n}")
        object.__setattr__(self, "pairs", tuple((i, k) for i in range(self.n)
                                                for k in range(i, self.n)))

    @property
    def N(self) -> int:
        return len(self.pairs)

    def weights(self) -> np.ndarray:
        """Coefficient a^{ik} = a^{ki} carried by each basis element."""
        return np.array([1.0 if i == k else 1 / math.sqrt(2) for i, k in self.pairs])

    def tensor(self, p: int) -> np.ndarray:
        """Basis element p as an n x n coefficient array a^{ik}."""
        i, k = self.pairs[p]
        a = np.zeros((self.n, self.n))
        w = self.weights()[p]
        a[i, k] = w
        a[k, i] = w
        return a


@lru_cache(maxsize=None)
def _index_maps(n: int):
    basis = SymBasis(n)
    I = np.array([i for i, _ in basis.pairs])
    K = np.array([k for _, k in basis.pairs])
    # s_p = (number of orderings) * weight: 1 on the diagonal, sqrt(2) off it
    s = np.array([1.0 if i == k else math.sqrt(2) for i, k in basis.pairs])
    pidx = np.zeros((n, n), dtype=int)
    for p, (i, k) in enumerate(basis.pairs):
        pidx[i, k] = pidx[k, i] = p
    return I, K, s, pidx


def operator_matrix(comp: np.ndarray) -> np.ndarray:
    """Matrix of the operator for a component array (or a stack of them).

    ``mat[p, q] = sum R_{i j̄ k l̄} a_p^{ik} conj(b_q^{jl})``.
    """
    comp = np.asarray(comp)
    n = comp.shape[-1]
    I, K, s, _ = _index_maps(n)
    sub = comp[..., I[:, None], I[None, :], K[:, None], K[None, :]]
    return sub * (s[:, None] * s[None, :])


def tensor_from_form(Q: np.ndarray, n: int) -> KahlerCurvature:
    """Inverse of :func:`operator_matrix`: Hermitian form on Sym^2 -> curvature tensor."""
    Q = np.asarray(Q, dtype=complex)
    check_hermitian(Q)
    Q = 0.5 * (Q + Q.conj().T)
    _, _, s, pidx = _index_maps(n)
    sf = s[pidx]
    T = Q[pidx[:, None, :, None], pidx[None, :, None, :]]
    T = T / (sf[:, None, :, None] * sf[None, :, None, :])
    return KahlerCurvature(n, T)


@dataclass(frozen=True, eq=False)
class SymOperator:
    n: int
    mat: np.ndarray = field(repr=False)
    spectrum: np.ndarray

    @property
    def N(self) -> int:
        return self.n * (self.n + 1) // 2

    def norm(self) -> float:
        return float(np.max(np.abs(self.spectrum)))


def build(Rc: KahlerCurvature) -> SymOperator:
    """Assemble the operator and its ascending spectrum."""
    mat = operator_matrix(Rc.comp)
    check_hermitian(mat)
    w, _ = hermitian_eigen(mat, check=False)
    mat.setflags(write=False)
    w.setflags(write=False)
    return SymOperator(Rc.n, mat, w)


def spectrum(Rc: KahlerCurvature) -> np.ndarray:
    return build(Rc).spectrum


def _check_k(k: int, N: int) -> None:
    if not 1 <= k <= N:
        raise InvalidArgument(f"k must lie in [1, {N}], got {k}")


def k_sum(S: SymOperator, k: int) -> float:
    """Sum of the k smallest eigenvalues."""
    _check_k(k, S.N)
    return float(np.sum(S.spectrum[:k]))


def default_tol(scale: float) -> float:
    return 1e-10 * (1.0 + scale)


def is_k_semipositive(Rc: KahlerCurvature, c: float, k: int, tol: float | None = None) -> bool:
    """Whether ``S - 2c id`` has nonnegative sum of its k smallest eigenvalues."""
    S = build(Rc)
    _check_k(k, S.N)
    if tol is None:
        tol = default_tol(S.norm())
    return k_sum(S, k) - 2 * c * k >= -tol


def kyfan_min(A, k: int) -> float:
    """Minimum of ``sum_s <A e_s, e_s>`` over orthonormal k-frames (Ky Fan)."""
    A = np.asarray(A)
    check_hermitian(A)
    _check_k(k, A.shape[0])
    w, _ = hermitian_eigen(A, check=False)
    return float(np.sum(w[:k]))


def partial_trace(A, frame) -> float:
    """``sum_s <A e_s, e_s>`` for the columns e_s of ``frame``."""
    A = np.asarray(A)
    F = np.asarray(frame)
    return float(np.einsum("is,ij,js->", np.conj(F), A, F).real)


# --------------------------------------------------------------------------
# Random tensors


def random_tensor(n: int, seed: int, scale: float = 1.0) -> KahlerCurvature:
    """Random Kähler curvature tensor from a random Hermitian form on Sym^2.

    The form is ``W diag(d) W^*`` with W a seeded random unitary of size N and
    d standard normal; mapping it back through the weighted basis gives all
    Kähler symmetries by construction.
    """
    N = n * (n + 1) // 2
    rng = np.random.default_rng(seed)
    d = scale * rng.standard_normal(N)
    W = random_unitary(N, int(rng.integers(2**63 - 1)))
    Q = (W * d) @ W.conj().T
    return tensor_from_form(Q, n)


def shift_to_k_semipositive(Rc: KahlerCurvature, c: float, k: int) -> KahlerCurvature:
    """Add the smallest constant-HBSC tensor making ``S - 2c id`` k-semipositive.

    Adding ``const_hbsc(n, t)`` shifts the operator by ``2t id``, so the
    result sits exactly on the boundary when a shift is needed.
    """
    S = build(Rc)
    _check_k(k, S.N)
    deficit = k_sum(S, k) - 2 * c * k
    if deficit >= 0:
        return Rc
    return Rc + const_hbsc(Rc.n, -deficit / (2 * k))


def random_admissible_tensors(n: int, k: int, c: float, count: int, seed: int) -> np.ndarray:
    """Stack (count, n, n, n, n) of random tensors with ``S - 2c id`` k-semipositive.

    Vectorized twin of ``shift_to_k_semipositive(random_tensor(...))``.
    """
    N = n * (n + 1) // 2
    _check_k(k, N)
    rng = np.random.default_rng(seed)
    d = rng.standard_normal((count, N))
    W = random_unitaries(N, count, int(rng.integers(2**63 - 1)))
    Q = np.einsum("bij,bj,bkj->bik", W, d, np.conj(W))
    Q = 0.5 * (Q + np.conj(np.swapaxes(Q, 1, 2)))
    _, _, s, pidx = _index_maps(n)
    sf = s[pidx]
    T = Q[:, pidx[:, None, :, None], pidx[None, :, None, :]]
    T = T / (sf[:, None, :, None] * sf[None, :, None, :])
    w, _ = hermitian_eigen(operator_matrix(T))
    deficit = np.sum(w[:, :k], axis=1) - 2 * c * k
    t = np.where(deficit < 0, -deficit / (2 * k), 0.0)
    T = T + t[:, None, None, None, None] * const_hbsc(n, 1.0).comp
    return np.stack([_symmetrize(x) for x in T])


# --------------------------------------------------------------------------
# Frame inequalities


def _frame_row(comp: np.ndarray, frame: np.ndarray) -> np.ndarray:
    """``R(E_n, Ē_n, E_i, Ē_i)`` for every column E_i of the frame (E_n = last column)."""
    U = np.asarray(frame, dtype=complex)
    u = U[:, -1]
    M = np.einsum("abcd,a,b->cd", comp, u, np.conj(u))
    return np.einsum("cd,ci,di->i", M, U, np.conj(U)).real


def _check_frame(frame, n: int) -> np.ndarray:
    U = np.asarray(frame, dtype=complex)
    if U.shape != (n, n):
        raise InvalidArgument(f"frame must be {n} x {n}")
    if np.abs(U.conj().T @ U - np.eye(n)).max() > 1e-10:
        raise InvalidArgument("frame must be unitary")
    return U


@dataclass(frozen=True)
class FrameCheck:
    lhs: float
    rhs: float
    holds: bool

    @property
    def gap(self) -> float:
        return self.lhs - self.rhs


def _tensor_tol(Rc: KahlerCurvature) -> float:
    return default_tol(float(np.abs(Rc.comp).max()))


def mixed_estimate_check(Rc: KahlerCurvature, c: float, k: int, alpha: float, frame,
                         tol: float | None = None) -> FrameCheck:
    """``R(E_n,Ē_n,E_n,Ē_n) + α Σ_{i<n} R(E_n,Ē_n,E_i,Ē_i) >= 2c + α(n-1)c``.

    Claimed for 1 <= k < n, α >= 2(k-1)/(n-1) and ``S - 2c id`` k-semipositive;
    if those fail, PreconditionUnmet is raised instead of a verdict.
    """
    n = Rc.n
    if not 1 <= k < n:
        raise PreconditionUnmet(f"need 1 <= k < n, got k={k}, n={n}")
    if alpha < 2 * (k - 1) / (n - 1) - 1e-15:
        raise PreconditionUnmet(f"alpha={alpha} below 2(k-1)/(n-1)")
    if not is_k_semipositive(Rc, c, k):
        raise PreconditionUnmet(f"S - 2c id is not {k}-semipositive for c={c}")
    U = _check_frame(frame, n)
    row = _frame_row(Rc.comp, U)
    lhs = float(row[-1] + alpha * np.sum(row[:-1]))
    rhs = 2 * c + alpha * (n - 1) * c
    if tol is None:
        tol = _tensor_tol(Rc)
    return FrameCheck(lhs, rhs, lhs >= rhs - tol)


def ricci_from_kpos_check(Rc: KahlerCurvature, c: float, k: int, tol: float | None = None) -> bool:
    """Ric >= (n+1)c whenever ``S - 2c id`` is k-semipositive with k <= (n+1)/2."""
    n = Rc.n
    if not 1 <= k <= (n + 1) / 2:
        raise PreconditionUnmet(f"need 1 <= k <= (n+1)/2, got k={k}, n={n}")
    if not is_k_semipositive(Rc, c, k):
        raise PreconditionUnmet(f"S - 2c id is not {k}-semipositive for c={c}")
    if tol is None:
        tol = _tensor_tol(Rc)
    return Rc.ricci_min_eigenvalue() >= (n + 1) * c - tol


def weighted_frame_check(Rc: KahlerCurvature, c: float, k: int, frame,
                         tol: float | None = None) -> FrameCheck:
    """``R(E_n,Ē_n,E_n,Ē_n) + 2 Σ_{i<k} R(E_n,Ē_n,E_i,Ē_i) >= 2kc``."""
    n = Rc.n
    if not 1 <= k <= n:
        raise PreconditionUnmet(f"need 1 <= k <= n, got k={k}, n={n}")
    if not is_k_semipositive(Rc, c, k):
        raise PreconditionUnmet(f"S - 2c id is not {k}-semipositive for c={c}")
    U = _check_frame(frame, n)
    row = _frame_row(Rc.comp, U)
    lhs = float(row[-1] + 2 * np.sum(row[:k - 1]))
    if tol is None:
        tol = _tensor_tol(Rc)
    return FrameCheck(lhs, 2 * k * c, lhs >= 2 * k * c - tol)


@dataclass
class SweepResult:
    trials: int = 0
    violations: int = 0
    min_gap: float = math.inf
    worst: dict | None = None
    alphas: list = field(default_factory=list)
    min_lhs: list = field(default_factory=list)
    rhs: list = field(default_factory=list)

    def record(self, gap: float, tol: float, **where) -> None:
        self.trials += 1
        if gap < self.min_gap:
            self.min_gap = gap
            self.worst = dict(gap=gap, **where)
        if gap < -tol:
            self.violations += 1


def mixed_estimate_sweep(n: int, k: int, c: float, tensors: int = 200, frames: int = 100,
                         alphas: int = 10, seed: int = 0, tol: float = 1e-8) -> SweepResult:
    """Randomized check of the mixed estimate over admissible tensors, frames and α.

    α runs over ``alphas`` equally spaced values in [2(k-1)/(n-1), 4].
    """
    if not 1 <= k < n:
        raise PreconditionUnmet(f"need 1 <= k < n, got k={k}, n={n}")
    T = random_admissible_tensors(n, k, c, tensors, seed)
    U = random_unitaries(n, tensors * frames, seed + 1).reshape(tensors, frames, n, n)
    u = U[..., :, -1]
    M = np.einsum("xabcd,xfa,xfb->xfcd", T, u, np.conj(u), optimize=True)
    row = np.einsum("xfcd,xfci,xfdi->xfi", M, U, np.conj(U), optimize=True).real
    alpha_grid = np.linspace(2 * (k - 1) / (n - 1), 4.0, alphas)
    lhs = row[..., -1][..., None] + np.sum(row[..., :-1], axis=-1)[..., None] * alpha_grid
    rhs = 2 * c + alpha_grid * (n - 1) * c
    gap = lhs - rhs
    res = SweepResult()
    res.trials = int(gap.size)
    res.violations = int(np.sum(gap < -tol))
    idx = np.unravel_index(int(np.argmin(gap)), gap.shape)
    res.min_gap = float(gap[idx])
    res.worst = dict(gap=res.min_gap, tensor=int(idx[0]), frame=int(idx[1]),
                     alpha=float(alpha_grid[idx[2]]), seed=seed, n=n, k=k, c=c)
    res.alphas = [float(a) for a in alpha_grid]
    res.min_lhs = [float(x) for x in lhs.reshape(-1, alphas).min(axis=0)]
    res.rhs = [float(x) for x in rhs]
    return res
