"""Exception hierarchy shared by all modules."""


class BarrierProdError(Exception):
    """Base class for package errors."""


class ParseError(BarrierProdError):
    """Malformed input file; message names the offending row."""


class ValidationError(BarrierProdError):
    """Input violates a data invariant (ordering, sign, duplicates)."""


class ConfigurationError(BarrierProdError):
    """Required setting missing (forward, discount, ...)."""


class DomainError(BarrierProdError, ValueError):
    """Model evaluated outside its domain of definition."""


class AdmissibilityError(DomainError):
    """Model produces a negative density somewhere on the grid."""


class InsufficientDataError(BarrierProdError):
    """Not enough usable quotes to calibrate the requested model."""
