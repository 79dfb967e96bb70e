"""Exception types shared across the package."""


class ContrastError(ValueError):
    """The two phases share a bulk or shear modulus, so the bounds are undefined."""


class DomainError(ValueError):
    """An argument lies outside the range an operation accepts (e.g. f1 not in (0, 1))."""


class TraceParseError(ValueError):
    """A boundary trace file could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TraceValidationError(ValueError):
    """A boundary trace is geometrically degenerate."""


class SolverError(RuntimeError):
    """An iterative or linear solve failed."""

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)
