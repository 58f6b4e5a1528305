"""Numerical toolkit for Kähler comparison geometry.

Curvature tensors in unitary frames, the symmetrized curvature operator,
model Laplacians and volumes, Riccati/Jacobi analysis along geodesics of
catalog models, and the exact Bernoulli series of the product example.
"""

from .curvature import (
    Hyperquadric,
    KahlerCurvature,
    Product,
    RadialProfile,
    Scaled,
    SpaceFormHBSC,
    const_hbsc,
    cp1_product,
    cpn,
    hyperquadric,
    product,
    radial_profile,
    scale_metric,
)
from .errors import (
    AccuracyError,
    ConjugatePointError,
    ContractError,
    DomainError,
    InvalidArgument,
    KahlerCompError,
    PreconditionUnmet,
)
from .sym_op import SymOperator, build, k_sum, spectrum

__version__ = "0.1.0"
