"""Exception hierarchy shared by every module."""


class QldpError(Exception):
    """Base class for library errors."""


class DomainError(QldpError, ValueError):
    """Argument outside the legal domain (parameter, level, support point)."""


class MMUndefinedError(QldpError):
    """The method-of-moments estimator (or the needed moment) does not exist."""


class MMInapplicableError(QldpError):
    """Moments exist but no large deviation result for the MM estimator applies."""


class NumericalError(QldpError):
    """A numerical procedure could not produce a trustworthy answer."""


class InsufficientTailEvents(NumericalError):
    """Monte Carlo run produced no deviation events to fit a decay rate."""
