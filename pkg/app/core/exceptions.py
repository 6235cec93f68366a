"""
Error types raised across the toolkit.

The CLI maps these onto exit codes (see ``app.main``).
"""
from typing import Any, Optional, Sequence


class WdraError(Exception):
    """Base class for all toolkit errors."""


class ParameterDomainError(WdraError, ValueError):
    """A parameter lies outside the domain an operation accepts."""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field


class ApproximationDomainError(ParameterDomainError):
    """lambda * dt >= 1, so the one-jump-per-step density is meaningless."""


class ShapeError(WdraError, ValueError):
    """Array shapes do not line up."""


class CalibrationInitError(WdraError):
    """The likelihood is not finite at the starting point."""

    def __init__(self, message: str, parameters: Sequence[str] = ()):
        super().__init__(message)
        self.parameters = tuple(parameters)


class NonConvergenceError(WdraError):
    """The optimizer stopped on max_iters; the best-seen result is attached."""

    def __init__(self, message: str, result: Any = None):
        super().__init__(message)
        self.result = result


class NonFiniteGradientError(WdraError, FloatingPointError):
    """A gradient handed to Adam contains NaN or inf."""

    def __init__(self, message: str, block: Optional[str] = None):
        super().__init__(message)
        self.block = block


class TrainingDivergenceError(WdraError):
    """The training objective became non-finite."""

    def __init__(self, message: str, epoch: int, batch: int, path: Optional[int] = None):
        super().__init__(message)
        self.epoch = epoch
        self.batch = batch
        self.path = path


class InputFileError(WdraError):
    """An input file is missing, malformed or inconsistent with the flags."""

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(message)
        self.line = line
