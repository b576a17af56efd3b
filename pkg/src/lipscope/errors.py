"""A script containing the exceptions raised by the package.

Exceptions split into two families: `InputError`s, raised when the
caller passed something invalid, and `NumericError`s, raised when a
computation on valid input could not produce an answer. The command
line maps the former to exit code 1 and the latter to exit code 2.
"""

from typing import Tuple
import numpy as np

class LipscopeError(Exception):
    """The root of all errors raised by the package."""

class InputError(LipscopeError, ValueError):
    """Raised when an argument, file, or flag is invalid."""

class DimensionError(InputError):
    """Raised when two shapes do not fit together."""

    def __init__(self, message: str, left: Tuple[int, ...], right: Tuple[int, ...]) -> None:
        """
        Parameters
        ----------
        message : str
            A description of the operation that failed.
        left : tuple of ints
            The shape of the first operand.
        right : tuple of ints
            The shape of the second operand.
        """
        super().__init__(f'{message}: {left} and {right} are incompatible')
        self.left: Tuple[int, ...] = left
        self.right: Tuple[int, ...] = right

class NotSymmetricError(InputError):
    """Raised when a matrix required to be symmetric is not."""

    def __init__(self, asymmetry: float) -> None:
        """
        Parameters
        ----------
        asymmetry : float
            The largest absolute difference between mirrored entries.
        """
        super().__init__(f'Matrix is not symmetric; max asymmetry {asymmetry:.3e}')
        self.asymmetry: float = asymmetry

class NumericError(LipscopeError):
    """Raised when a computation could not produce a result."""

class ConvergenceError(NumericError):
    """Raised when an iterative method reaches its iteration cap."""

    def __init__(self, message: str, iterate: np.ndarray, residual: float) -> None:
        """
        Parameters
        ----------
        message : str
            A description of the method that failed.
        iterate : ndarray
            The last iterate of the method.
        residual : float
            The last measured residual.
        """
        super().__init__(f'{message} (residual {residual:.3e})')
        self.iterate: np.ndarray = iterate
        self.residual: float = residual

class SingularMatrixError(NumericError):
    """Raised when elimination meets a pivot that is zero to working precision."""

    def __init__(self, pivot: int) -> None:
        """
        Parameters
        ----------
        pivot : int
            The index of the singular pivot.
        """
        super().__init__(f'Matrix is singular to working precision at pivot {pivot}')
        self.pivot: int = pivot

class LyapunovError(NumericError):
    """Raised when the Lyapunov equation has no unique solution."""

    def __init__(self, message: str = 'no unique Lyapunov solution') -> None:
        super().__init__(message)

class HurwitzIndeterminateError(LyapunovError):
    """Raised when the Hurwitz test cannot decide because the Lyapunov
    equation has no unique solution."""

    def __init__(self) -> None:
        super().__init__('Hurwitz test indeterminate: no unique Lyapunov solution')

class NotHurwitzError(NumericError):
    """Raised when a stability system is built from a non-Hurwitz state matrix."""

class NotPositiveDefiniteError(NumericError):
    """Raised when a matrix required to be positive definite is not."""

class TrainingDivergenceError(NumericError):
    """Raised when the training loss stops being finite."""

    def __init__(self, epoch: int, learning_rate: float) -> None:
        """
        Parameters
        ----------
        epoch : int
            The epoch where the loss diverged.
        learning_rate : float
            The learning rate in use.
        """
        super().__init__(f'Training diverged at epoch {epoch}; '
            + f'try a learning rate smaller than {learning_rate}')
        self.epoch: int = epoch
        self.learning_rate: float = learning_rate
