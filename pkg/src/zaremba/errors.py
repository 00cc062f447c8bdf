"""Exception hierarchy shared by all modules."""


class ZarembaError(Exception):
    """Base class for every error raised by the package."""


class InvalidDimension(ZarembaError, ValueError):
    pass


class UnsupportedDimension(ZarembaError, ValueError):
    pass


class InvalidBody(ZarembaError, ValueError):
    """Unbounded, empty or otherwise malformed convex body."""


class DegenerateBody(InvalidBody):
    """A declared facet does not support a full (n-1)-dimensional face."""


class EmptyErosion(ZarembaError, ValueError):
    pass


class InvalidInput(ZarembaError, ValueError):
    pass


class InvalidDelta(ZarembaError, ValueError):
    pass


class InvalidStencil(ZarembaError, ValueError):
    pass


class GenerationFailure(ZarembaError, RuntimeError):
    pass


class InfeasibleVolume(ZarembaError, ValueError):
    pass


class InsufficientSamples(ZarembaError, ValueError):
    pass


class FittingFailure(ZarembaError, RuntimeError):
    pass


class SolverFailure(ZarembaError, RuntimeError):
    """Iterative solver did not converge; ``diagnostics`` carries the history."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class AlignmentError(ZarembaError, ValueError):
    pass


class InvalidPairing(ZarembaError, ValueError):
    pass


class InvalidField(ZarembaError, ValueError):
    pass


class ConfigError(ZarembaError, ValueError):
    """Bad experiment configuration; ``path`` names the offending field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
