"""Exception types raised across the package."""


class ParameterError(ValueError):
    """Invalid argument: out-of-range exponent, grid mismatch, bad index."""


class DivergenceError(ArithmeticError):
    """A trajectory left the finite range allowed by the divergence guard."""

    def __init__(self, message, step=None, path=None):
        super().__init__(message)
        self.step = step
        self.path = path
