"""Exception hierarchy shared by all modules."""


class HorizonError(Exception):
    """Base class; the CLI maps it to a JSON error object and exit code 3."""

    code = "error"

    def to_dict(self):
        return {"error": self.code, "message": str(self)}


class ValidationError(HorizonError, ValueError):
    code = "validation"


class ImaginaryCouplingError(ValidationError):
    """A rescaled coupling gamma > 1 would require g**2 < 0."""

    code = "imaginary-coupling"


class ConsistencyError(HorizonError, ArithmeticError):
    """An internal invariant failed; indicates a construction bug."""

    code = "internal-consistency"


class UnsupportedError(HorizonError):
    code = "unsupported"


class ConvergenceError(HorizonError, ArithmeticError):
    code = "no-convergence"

    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


class NoSolutionError(HorizonError):
    code = "no-solution"
