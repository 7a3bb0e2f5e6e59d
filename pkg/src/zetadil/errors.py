"""Exception hierarchy shared by all modules."""


class ZetadilError(Exception):
    """Base class for errors raised by this package."""


class DomainError(ZetadilError, ValueError):
    """Argument outside the domain where the operation is defined."""


class LengthError(ZetadilError, ValueError):
    """Requested truncation exceeds the available coefficients."""


class NonInvertibleError(ZetadilError, ValueError):
    """Sequence has no Dirichlet inverse (leading coefficient is zero)."""


class PoleError(DomainError):
    """Evaluation point falls inside the guard disc around a pole."""


class InsufficientDecayError(ZetadilError, ValueError):
    """No decay hypothesis available to certify a truncation tail."""


class ResolutionError(ZetadilError, ValueError):
    """Quadrature budget too small to resolve the requested modes."""


class NumericalFailure(ZetadilError, RuntimeError):
    """A self-check exceeded its tolerance."""
