"""Exception types shared across the toolkit."""


class DomainError(ValueError):
    """An argument lies outside the documented domain of an operation."""


class GridMismatchError(DomainError):
    """Two fields that must share a grid do not."""


class EvaluationError(RuntimeError):
    """A pointwise evaluation produced a non-finite sample."""


class ContaminationError(RuntimeError):
    """A field violates the boundary-decay requirement of a strict operator apply."""


class AccuracyError(RuntimeError):
    """A quadrature result failed its internal consistency check."""


class SolverError(RuntimeError):
    """The iterative eigensolver did not converge."""

    def __init__(self, message, attained_residuals=None):
        super().__init__(message)
        self.attained_residuals = attained_residuals


class DivergenceError(RuntimeError):
    """A regulator schedule did not converge monotonically."""

    def __init__(self, message, sequence=None):
        super().__init__(message)
        self.sequence = sequence
