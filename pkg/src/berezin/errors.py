"""Exception hierarchy shared by all modules."""


class BerezinError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(BerezinError, ValueError):
    """Malformed argument: wrong shape, non-finite entries, broken invariant."""


class DomainError(BerezinError, ValueError):
    """Argument outside the region where the formula is defined."""


class BranchAmbiguity(DomainError):
    """A multivalued power was requested on its branch cut without a path."""


class NumericalFailure(BerezinError, ArithmeticError):
    """A computed quantity violated an identity it must satisfy."""


class RefinementRequired(NumericalFailure):
    """Sampling of a path is too coarse for an unambiguous argument lift."""


class Unsupported(BerezinError, NotImplementedError):
    """The object lacks data (e.g. an isotopy) needed by the operation."""
