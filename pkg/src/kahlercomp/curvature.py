"""Kähler curvature tensors in unitary frames and the model-space catalog.

Components are stored as ``comp[i, j, k, l] = R(E_i, Ē_j, E_k, Ē_l)`` for a
fixed unitary frame E_1..E_n. The normalization is pinned by complex
projective space with its Fubini-Study metric: constant holomorphic
bisectional curvature c has ``comp = c (δ_ij δ_kl + δ_il δ_kj)``, which gives
HSC = 2c, Ric = (n+1)c and a symmetrized operator equal to 2c times identity.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import ContractError, InvalidArgument
from .numkit import eigvalsh

SYMMETRY_RTOL = 1e-12


def _symmetrize(T: np.ndarray) -> np.ndarray:
    # Sequential averaging; each stage preserves the previous symmetry bit-for-bit.
    T = 0.5 * (T + T.transpose(2, 1, 0, 3))
    T = 0.5 * (T + T.transpose(0, 3, 2, 1))
    T = 0.5 * (T + np.conj(T.transpose(1, 0, 3, 2)))
    return T


@dataclass(frozen=True, eq=False)
class KahlerCurvature:
    """Rank-4 complex curvature array with Kähler symmetries.

    Construction verifies the symmetries to ``1e-12`` relative and then stores
    the exactly symmetrized array, so stored components satisfy

    * ``comp[i,j,k,l] == comp[k,j,i,l] == comp[i,l,k,j]``
    * ``comp[i,j,k,l] == conj(comp[j,i,l,k])``

    with no rounding slack.
    """

    n: int
    comp: np.ndarray = field(repr=False)

    def __post_init__(self):
        T = np.array(self.comp, dtype=complex)
        n = self.n
        if n < 1 or T.shape != (n, n, n, n):
            raise ContractError(f"expected component array of shape {(n,) * 4}, got {T.shape}")
        scale = max(1.0, float(np.abs(T).max()))
        for other in (T.transpose(2, 1, 0, 3), T.transpose(0, 3, 2, 1),
                      np.conj(T.transpose(1, 0, 3, 2))):
            dev = float(np.abs(T - other).max())
            if dev > SYMMETRY_RTOL * scale:
                raise ContractError(f"tensor violates Kähler symmetry (deviation {dev:.3e})")
        T = _symmetrize(T)
        T.setflags(write=False)
        object.__setattr__(self, "comp", T)

    def __add__(self, other: "KahlerCurvature") -> "KahlerCurvature":
        if other.n != self.n:
            raise InvalidArgument("dimension mismatch")
        return KahlerCurvature(self.n, self.comp + other.comp)

    def transform(self, U: np.ndarray) -> "KahlerCurvature":
        """Components in the frame ``E'_a = sum_i U[i, a] E_i`` (U unitary)."""
        U = np.asarray(U, dtype=complex)
        Uc = np.conj(U)
        T = np.einsum("ijkl,ia,jb,kc,ld->abcd", self.comp, U, Uc, U, Uc, optimize=True)
        return KahlerCurvature(self.n, _symmetrize(T))

    def hsc(self, X) -> float:
        """Holomorphic sectional curvature R(X, X̄, X, X̄) of a unit vector."""
        X = _unit(X, self.n)
        Xc = np.conj(X)
        return float(np.einsum("ijkl,i,j,k,l->", self.comp, X, Xc, X, Xc).real)

    def hbsc(self, X, Y) -> float:
        """Holomorphic bisectional curvature R(X, X̄, Y, Ȳ) of unit vectors."""
        X = _unit(X, self.n)
        Y = _unit(Y, self.n)
        return float(np.einsum("ijkl,i,j,k,l->", self.comp, X, np.conj(X), Y, np.conj(Y)).real)

    def ricci_matrix(self) -> np.ndarray:
        """Ric(E_i, Ē_j) = sum_k R(E_i, Ē_j, E_k, Ē_k)."""
        return np.einsum("ijkk->ij", self.comp)

    def ricci_min_eigenvalue(self) -> float:
        return float(eigvalsh(self.ricci_matrix())[0])

    def hsc_min(self, seed: int = 0, starts: int = 24) -> float:
        """Numerical minimum of HSC over the unit sphere (multi-start local search).

        An upper estimate of the true minimum; used only to verify hypotheses
        on catalog models, where the minimum is attained at structured
        vectors that are always among the starting points.
        """
        from scipy.optimize import minimize

        n = self.n
        T = self.comp

        def f(x):
            z = x[:n] + 1j * x[n:]
            z = z / np.linalg.norm(z)
            zc = np.conj(z)
            return float(np.einsum("ijkl,i,j,k,l->", T, z, zc, z, zc).real)

        rng = np.random.default_rng(seed)
        inits = [np.eye(2 * n)[i] for i in range(n)]
        inits.append(np.concatenate([np.ones(n), np.zeros(n)]))
        inits += list(rng.standard_normal((starts, 2 * n)))
        best = math.inf
        for x0 in inits:
            best = min(best, f(x0))
            res = minimize(f, x0, method="BFGS", options={"gtol": 1e-12})
            best = min(best, float(res.fun))
        return best

    def to_json(self) -> str:
        """``{"n": n, "comp": [[re, im], ...]}`` with comp flattened row-major."""
        flat = self.comp.reshape(-1)
        return json.dumps({"n": self.n, "comp": [[float(z.real), float(z.imag)] for z in flat]})

    @classmethod
    def from_json(cls, text: str) -> "KahlerCurvature":
        obj = json.loads(text)
        n = int(obj["n"])
        arr = np.array([complex(re, im) for re, im in obj["comp"]]).reshape((n,) * 4)
        return cls(n, arr)


def _unit(X, n: int) -> np.ndarray:
    X = np.asarray(X, dtype=complex).reshape(-1)
    if X.shape != (n,):
        raise InvalidArgument(f"expected a vector of length {n}")
    if abs(np.linalg.norm(X) - 1.0) > 1e-10:
        raise InvalidArgument("vector must have unit length")
    return X


def curvature_queries(Rc: KahlerCurvature, X, Y) -> dict:
    """Bundle of the basic curvature quantities at unit vectors X, Y."""
    return {
        "hsc": Rc.hsc(X),
        "hbsc": Rc.hbsc(X, Y),
        "ricci_matrix": Rc.ricci_matrix(),
        "ricci_min_eigenvalue": Rc.ricci_min_eigenvalue(),
    }


def const_hbsc(n: int, c: float) -> KahlerCurvature:
    """Constant holomorphic bisectional curvature c in complex dimension n."""
    if n < 1:
        raise InvalidArgument(f"n must be >= 1, got {n}")
    d = np.eye(n)
    T = c * (np.einsum("ij,kl->ijkl", d, d) + np.einsum("il,kj->ijkl", d, d))
    return KahlerCurvature(n, T)


def hyperquadric(n: int) -> KahlerCurvature:
    """Hyperquadric in CP^{n+1} with the induced metric.

    Frame form ``δ_ij δ_kl + δ_il δ_kj - δ_ik δ_jl``; its symmetrized operator
    has spectrum {2 - n, 2, ..., 2} and it is Einstein with constant n.
    """
    if n < 2:
        raise InvalidArgument(f"hyperquadric needs n >= 2, got {n}")
    d = np.eye(n)
    T = (np.einsum("ij,kl->ijkl", d, d) + np.einsum("il,kj->ijkl", d, d)
         - np.einsum("ik,jl->ijkl", d, d))
    return KahlerCurvature(n, T)


def product(factors: Sequence[KahlerCurvature]) -> KahlerCurvature:
    """Block tensor of a Riemannian product of Kähler factors."""
    factors = list(factors)
    if not factors:
        raise InvalidArgument("product needs at least one factor")
    n = sum(f.n for f in factors)
    T = np.zeros((n,) * 4, dtype=complex)
    off = 0
    for f in factors:
        s = slice(off, off + f.n)
        T[s, s, s, s] = f.comp
        off += f.n
    return KahlerCurvature(n, T)


def scale_metric(Rc: KahlerCurvature, lam: float) -> KahlerCurvature:
    """Curvature of the metric ``lam * g``: unitary-frame components divide by lam."""
    if not lam > 0:
        raise InvalidArgument(f"metric factor must be positive, got {lam}")
    return KahlerCurvature(Rc.n, Rc.comp / lam)


# --------------------------------------------------------------------------
# Model catalog


@dataclass(frozen=True)
class SpaceFormHBSC:
    """Simply connected model M_c: CP^n (c>0), C^n (c=0), complex hyperbolic (c<0)."""

    n: int
    c: float

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgument(f"n must be >= 1, got {self.n}")

    def tensor(self) -> KahlerCurvature:
        return const_hbsc(self.n, self.c)

    def diameter(self) -> float:
        if self.c <= 0:
            return math.inf
        return math.pi / math.sqrt(2 * self.c)


@dataclass(frozen=True)
class Hyperquadric:
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise InvalidArgument(f"hyperquadric needs n >= 2, got {self.n}")

    def tensor(self) -> KahlerCurvature:
        return hyperquadric(self.n)


@dataclass(frozen=True)
class Product:
    factors: tuple

    def __post_init__(self):
        if not self.factors:
            raise InvalidArgument("product needs at least one factor")
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def n(self) -> int:
        return sum(f.n for f in self.factors)

    def tensor(self) -> KahlerCurvature:
        return product([f.tensor() for f in self.factors])

    def diameter(self) -> float:
        return math.sqrt(sum(as_space_form(f).diameter() ** 2 for f in self.factors))


@dataclass(frozen=True)
class Scaled:
    base: object
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise InvalidArgument(f"metric factor must be positive, got {self.lam}")

    @property
    def n(self) -> int:
        return self.base.n

    def tensor(self) -> KahlerCurvature:
        return scale_metric(self.base.tensor(), self.lam)

    def diameter(self) -> float:
        return as_space_form(self).diameter()


ModelSpace = Union[SpaceFormHBSC, Hyperquadric, Product, Scaled]


def as_space_form(M) -> SpaceFormHBSC:
    """Collapse Scaled(...Scaled(SpaceFormHBSC)) to a single SpaceFormHBSC."""
    if isinstance(M, SpaceFormHBSC):
        return M
    if isinstance(M, Scaled):
        base = as_space_form(M.base)
        return SpaceFormHBSC(base.n, base.c / M.lam)
    raise InvalidArgument(f"{type(M).__name__} is not a constant-HBSC model")


def cpn(n: int, c: float = 1.0) -> SpaceFormHBSC:
    return SpaceFormHBSC(n, c)


def cp1_product(n: int, hsc: float | None = None) -> Product:
    """n-fold product of CP^1 factors, each (CP^1, (2/(n+1)) ω_FS) by default.

    With the default scaling every factor has HSC = n+1 and Ric = (n+1) ω_g.
    """
    if n < 1:
        raise InvalidArgument(f"n must be >= 1, got {n}")
    if hsc is None:
        factor = Scaled(SpaceFormHBSC(1, 1.0), 2.0 / (n + 1))
    else:
        factor = SpaceFormHBSC(1, hsc / 2.0)
    return Product(tuple([factor] * n))


# --------------------------------------------------------------------------
# Radial curvature along geodesics


@dataclass(frozen=True)
class RadialProfile:
    """Constant radial sectional curvatures along a geodesic from the base point.

    ``entries`` is a tuple of ``(multiplicity, kappa)`` over the 2n-1 real
    directions orthogonal to γ'. The first entry is the Jγ' direction for a
    space form; for products the leading entries are the per-factor J-directions.
    """

    n: int
    entries: tuple

    def __post_init__(self):
        entries = tuple((int(m), float(k)) for m, k in self.entries if int(m) > 0)
        if sum(m for m, _ in entries) != 2 * self.n - 1:
            raise ContractError(f"multiplicities must sum to {2 * self.n - 1}")
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return 2 * self.n - 1

    def kappas(self) -> np.ndarray:
        return np.array([k for _, k in self.entries])

    def multiplicities(self) -> np.ndarray:
        return np.array([m for m, _ in self.entries])


def check_mix(mix, m: int) -> np.ndarray:
    lam = np.asarray(mix, dtype=float).reshape(-1)
    if lam.shape != (m,):
        raise InvalidArgument(f"mix needs {m} entries, got {lam.size}")
    if abs(float(np.sum(lam * lam)) - 1.0) > 1e-12:
        raise InvalidArgument("mix must satisfy sum(lambda_i^2) = 1")
    return lam


def radial_profile(M, mix=None) -> RadialProfile:
    """Radial curvature data of a catalog model along a geodesic.

    Space forms need no mix. Products need a direction mix ``lambda`` with
    ``sum(lambda_i^2) = 1`` giving the speed of the geodesic in each factor.
    """
    if isinstance(M, Hyperquadric):
        raise InvalidArgument("radial profiles of the hyperquadric are not supported")
    if isinstance(M, (SpaceFormHBSC, Scaled)):
        sf = as_space_form(M)
        return RadialProfile(sf.n, ((1, 2 * sf.c), (2 * sf.n - 2, sf.c / 2)))
    if isinstance(M, Product):
        factors = [as_space_form(f) for f in M.factors]
        lam = check_mix(mix, len(factors))
        lead = []
        rest = []
        for f, l in zip(factors, lam):
            l2 = float(l * l)
            lead.append((1, 2 * f.c * l2))
            rest.append((2 * f.n - 2, f.c * l2 / 2))
        flat = [(len(factors) - 1, 0.0)]
        return RadialProfile(M.n, tuple(lead + rest + flat))
    raise InvalidArgument(f"unsupported model {M!r}")
