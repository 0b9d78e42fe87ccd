"""Exception hierarchy.

InputError covers malformed or mismatched arguments, DomainError covers
mathematical preconditions (for example a non-self-adjoint matrix passed to a
positivity test), ConstructionError covers objects that fail their defining
axioms at build time and carries a machine-readable ``reason``.
"""


class CovsysError(Exception):
    pass


class InputError(CovsysError, ValueError):
    pass


class DomainError(CovsysError, ValueError):
    pass


class ConstructionError(CovsysError, ValueError):
    def __init__(self, reason, message=None, witness=None):
        super().__init__(message or reason)
        self.reason = reason
        self.witness = witness


class QuadratureError(CovsysError, RuntimeError):
    def __init__(self, message, estimate=None, indicator=None):
        super().__init__(message)
        self.estimate = estimate
        self.indicator = indicator


class IntertwinerError(CovsysError, RuntimeError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
