class ConvergenceError(RuntimeError):
    """An iterative or two-resolution computation failed to settle."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class EnumerationOverflow(RuntimeError):
    """The lattice enumeration radius grew past its hard limit."""
