"""Exception hierarchy. Every error carries a machine-readable ``code``."""


class QCKitError(Exception):
    code = "error"


class ValidationError(QCKitError, ValueError):
    """Bad input: malformed data, violated preconditions."""

    code = "validation"


class IncompleteDataError(ValidationError):
    """A query reaches outside the range over which the data is complete."""

    code = "incomplete_data"


class IncompleteSpectrumError(IncompleteDataError):
    code = "incomplete_spectrum"


class PoleError(ValidationError):
    code = "pole"

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NumericalError(QCKitError, ArithmeticError):
    """A numerical result could not be certified at the requested tolerance."""

    code = "tolerance"


class MissedRootError(NumericalError):
    code = "missed_roots"
