"""Exception hierarchy."""


class MharmError(Exception):
    """Base class for all package errors."""


class InvalidSpecError(MharmError, ValueError):
    """A grid, quadrature or generator parameter is out of range."""


class DomainError(MharmError, ValueError):
    """An argument lies outside the domain of the operation."""


class AliasingError(MharmError, ValueError):
    """Too few angular samples to resolve the requested modes."""


class ExtensionDomainError(MharmError):
    """A holomorphic extension is evaluated where its spectral sum diverges."""


class InadmissibleWeightError(MharmError, ValueError):
    """A Bergman weight pair violates an admissibility condition."""


class NotInRangeError(MharmError):
    """A function is not in the range of the Poisson semigroup."""


class NonInvertibleSymbolError(MharmError):
    """A spectral multiplier underflows where it must be inverted."""


class PreconditionError(MharmError):
    """An operation's documented precondition does not hold."""


class TruncationWarning(UserWarning):
    """A truncated sum or integral dropped a non-negligible tail."""
