"""Exception hierarchy shared by all modules."""


class BergballError(Exception):
    """Base class for every error raised by the package."""


class AdmissibilityError(BergballError, ValueError):
    """Space parameters (n, nu, m) outside the discrete-spectrum range."""


class PoleError(BergballError, ArithmeticError):
    pass


class ConvergenceError(BergballError, ArithmeticError):
    """A series or quadrature did not reach its tolerance within budget."""


class DivergenceError(ConvergenceError):
    pass


class DegenerateParameterError(BergballError, ArithmeticError):
    """Connection formula hit an integer parameter difference."""


class NonTerminatingError(BergballError, ValueError):
    pass


class CapacityError(BergballError, MemoryError):
    pass


class DomainError(BergballError, ValueError):
    """Argument outside the region where the routine is defined."""


class AuditError(BergballError):
    """No candidate constant set reproduces the quadrature oracle."""
