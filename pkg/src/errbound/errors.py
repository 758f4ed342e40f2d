"""Exception hierarchy shared by all modules."""


class ErrboundError(Exception):
    """Base class for every error raised by this package."""


class InputError(ErrboundError, ValueError):
    """Invalid sizes, parameters or configuration values."""


class ModelError(ErrboundError):
    """The problem model is inconsistent (infeasible set, missing structure, ...)."""


class GenerationError(ErrboundError):
    """A random instance could not be certified after repeated regeneration."""


class NumericalError(ErrboundError, ArithmeticError):
    """Non-finite values or a stalled inner solver."""


class PreconditionError(ErrboundError):
    """A mathematical precondition (e.g. ``gamma >= L``) is not satisfied."""


class SamplingError(ErrboundError):
    """Too few valid sample points were produced."""
