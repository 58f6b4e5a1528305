"""Exception hierarchy shared by all modules."""


class KahlerCompError(Exception):
    """Base class for library errors."""


class ContractError(KahlerCompError, ValueError):
    """Input violates a structural contract (non-Hermitian matrix, broken tensor symmetry)."""


class InvalidArgument(KahlerCompError, ValueError):
    """Parameter outside its admissible range."""


class DomainError(KahlerCompError, ValueError):
    """Evaluation point outside the domain of a comparison function."""


class ConjugatePointError(DomainError):
    """Riccati integration reached (or would pass) a conjugate point."""


class AccuracyError(KahlerCompError, ArithmeticError):
    """A quadrature or grid could not meet its accuracy target."""


class PreconditionUnmet(KahlerCompError):
    """Curvature hypothesis of an inequality does not hold for the given input.

    Distinct from an inequality violation: the inequality is simply not claimed.
    """
