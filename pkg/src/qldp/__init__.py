"""Large-deviation rate functions for quantile- and moment-matching estimators."""

from .distributions import FamilyId, FamilySpec, make_family, make_gtilde, skew_quantile
from .errors import (DomainError, InsufficientTailEvents, MMInapplicableError,
                     MMUndefinedError, NumericalError, QldpError)

__all__ = [
    "FamilyId", "FamilySpec", "make_family", "make_gtilde", "skew_quantile",
    "DomainError", "InsufficientTailEvents", "MMInapplicableError",
    "MMUndefinedError", "NumericalError", "QldpError",
]
__version__ = "0.1.0"
