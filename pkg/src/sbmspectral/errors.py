"""Exception hierarchy shared by every module."""


class ParameterError(ValueError):
    """Invalid model, grid, or command-line parameters."""


class NumericError(ArithmeticError):
    """A numerical routine failed (non-convergence, singular system, ...)."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class IsolatedVertexError(NumericError):
    """A vertex has zero degree, so D^{-1/2} does not exist."""

    def __init__(self, vertex):
        super().__init__(f"vertex {vertex} is isolated (degree 0)", {"vertex": vertex})
        self.vertex = vertex


class DegenerateGapError(NumericError):
    """The eigenvalue separation used as a denominator is not positive."""


class NearSingularResolventError(NumericError):
    """A diagonal resolvent (d_i - lambda) is numerically zero."""

    def __init__(self, vertex, value):
        super().__init__(
            f"resolvent is near-singular at vertex {vertex} (d_i - lambda = {value:.3e})",
            {"vertex": vertex, "value": value},
        )
        self.vertex = vertex
