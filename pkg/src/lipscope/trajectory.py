"""A script containing the trajectory-length measure of expressiveness:
how much a network stretches a one-dimensional input path, and how that
stretch compares with the Lipschitz estimates of the architecture.
"""

from dataclasses import dataclass
from typing import List, Sequence
import math
import numpy as np
from numpy.typing import ArrayLike, NDArray
from lipscope.bounds import exact_upper_bound, rmt_lower_bound
from lipscope.errors import InputError, DimensionError
from lipscope.experiment.runner import parallel_map
from lipscope.log import Logger, QUIET
from lipscope.network import Architecture, Network, forward, sample_network
from lipscope.rng import derive_substream

DEFAULT_POINTS: int = 8192
"""The default number of points discretizing an input trajectory."""

@dataclass(frozen = True, eq = False)
class Trajectory:
    """A discretized one-dimensional path through input space."""

    points: NDArray[np.float64]
    """The points in path order, one per row."""
    closed: bool = False
    """Whether the path returns from its last point to its first."""

    def __post_init__(self) -> None:
        points: NDArray[np.float64] = np.array(self.points, dtype = np.float64)
        if points.ndim != 2 or points.shape[0] < 3:
            raise InputError(f'A trajectory needs at least 3 points as rows, got shape {points.shape}')
        if not np.all(np.isfinite(points)):
            raise InputError('Trajectory points must be finite')
        steps: NDArray[np.float64] = np.diff(points, axis = 0)
        if self.closed:
            steps = np.vstack((steps, points[:1] - points[-1:]))
        if np.any(np.all(steps == 0.0, axis = 1)):
            raise InputError('Consecutive trajectory points must be distinct')
        points.setflags(write = False)
        object.__setattr__(self, 'points', points)

    @property
    def dim(self) -> int:
        """The dimension of the input space."""
        return self.points.shape[1]

    @property
    def length(self) -> float:
        """The polyline length of the path."""
        return polyline_length(self.points, closed = self.closed)

def circle_trajectory(dim: int = 2, radius: float = 1.0,
        num_points: int = DEFAULT_POINTS) -> Trajectory:
    """Builds a closed circle in the first two coordinates with uniform
    angular spacing; the other coordinates are zero.

    Parameters
    ----------
    dim : int (default 2)
        The dimension of the input space, at least 2.
    radius : float (default 1.0)
        The radius of the circle.
    num_points : int (default 8192)
        The number of points, at least 8.

    Returns
    -------
    Trajectory
        The circle.
    """
    if dim < 2:
        raise InputError(f'A circle needs at least 2 dimensions, got {dim}')
    if not radius > 0.0:
        raise InputError(f'radius must be positive, got {radius}')
    if num_points < 8:
        raise InputError(f'A circle needs at least 8 points, got {num_points}')

    angles: NDArray[np.float64] = 2.0 * np.pi * np.arange(num_points) / num_points
    points: NDArray[np.float64] = np.zeros((num_points, dim))
    points[:, 0] = radius * np.cos(angles)
    points[:, 1] = radius * np.sin(angles)
    return Trajectory(points, closed = True)

def line_trajectory(start: ArrayLike, end: ArrayLike, num_points: int = DEFAULT_POINTS) -> Trajectory:
    """Builds the open segment from `start` to `end` with evenly spaced points.

    Parameters
    ----------
    start : array_like
        The first point.
    end : array_like
        The last point.
    num_points : int (default 8192)
        The number of points, at least 3.

    Returns
    -------
    Trajectory
        The segment.
    """
    start = np.asarray(start, dtype = np.float64)
    end = np.asarray(end, dtype = np.float64)
    if start.shape != end.shape or start.ndim != 1:
        raise DimensionError('Segment endpoints must be vectors of equal length',
            start.shape, end.shape)
    return Trajectory(np.linspace(start, end, num_points), closed = False)

def polyline_length(points: ArrayLike, closed: bool = False) -> float:
    """Sums the Euclidean distances between consecutive points.

    Parameters
    ----------
    points : array_like
        At least two points, one per row.
    closed : bool (default False)
        Whether to add the segment from the last point back to the first.

    Returns
    -------
    float
        The length of the polyline.
    """
    points = np.asarray(points, dtype = np.float64)
    if points.ndim != 2 or points.shape[0] < 2:
        raise InputError(f'A polyline needs at least 2 points as rows, got shape {points.shape}')
    length: float = float(np.sum(np.linalg.norm(np.diff(points, axis = 0), axis = 1)))
    if closed:
        length += float(np.linalg.norm(points[0] - points[-1]))
    return length

def output_trajectory_length(net: Network, traj: Trajectory) -> float:
    """Computes the length of the image of a trajectory under a network,
    joining the outputs in input order.

    Parameters
    ----------
    net : Network
        The network.
    traj : Trajectory
        The input trajectory.

    Returns
    -------
    float
        The length of the output polyline.
    """
    if traj.dim != net.arch.input_dim:
        raise DimensionError('Trajectory does not fit the network input',
            (traj.dim,), (net.arch.input_dim,))
    return polyline_length(forward(net, traj.points), closed = traj.closed)

def stretch_ratio(net: Network, traj: Trajectory) -> float:
    """Returns the output trajectory length divided by the input length.

    Parameters
    ----------
    net : Network
        The network.
    traj : Trajectory
        The input trajectory.

    Returns
    -------
    float
        The stretch of the trajectory.
    """
    return output_trajectory_length(net, traj) / traj.length

def rmt_trajectory_lower(n: int, depth_l: int, sigma_w: float) -> float:
    """Computes the growth factor (σ_w n / √(n+1))^{L+1} of the expected
    output trajectory length of a relu network with hidden width n and
    L hidden layers, taking the implied constant as 1.

    Parameters
    ----------
    n : int
        The hidden width, at least 1.
    depth_l : int
        The number of hidden layers L, at least 0.
    sigma_w : float
        The weight standard deviation.

    Returns
    -------
    float
        The growth factor.
    """
    if n < 1 or depth_l < 0:
        raise InputError(f'Need n >= 1 and L >= 0, got n={n}, L={depth_l}')
    if not sigma_w > 0.0:
        raise InputError(f'sigma_w must be positive, got {sigma_w}')
    return (sigma_w * n / math.sqrt(n + 1)) ** (depth_l + 1)

@dataclass(frozen = True)
class CorrelationRow:
    """The stretch of one sampled relu network against its estimates."""

    width: int
    """The hidden width."""
    depth: int
    """The number of hidden layers."""
    stretch_ratio: float
    """The measured trajectory stretch."""
    rmt_lower: float
    """The architecture estimate of the Lipschitz lower bound."""
    rmt_trajectory: float
    """The trajectory growth factor of the architecture."""
    exact_upper: float
    """The exact Lipschitz upper bound of the sampled network."""

def expressiveness_correlation(widths: Sequence[int], depths: Sequence[int], sigma_w: float,
        master_seed: int, traj: Trajectory, sigma_b: float = 0.0, threads: int = 1,
        logger: Logger = QUIET) -> List[CorrelationRow]:
    """Samples one relu network per (width, depth) cell and measures how
    it stretches a trajectory. Cells are enumerated width-major, and cell
    `k` samples from `derive_substream(master_seed, k)`.

    Parameters
    ----------
    widths : sequence of ints
        The hidden widths.
    depths : sequence of ints
        The numbers of hidden layers.
    sigma_w : float
        The weight standard deviation.
    master_seed : int
        The master seed.
    traj : Trajectory
        The input trajectory; its dimension is the input and output width.
    sigma_b : float (default 0.0)
        The bias standard deviation.
    threads : int (default 1)
        The number of worker threads.
    logger : Logger (default QUIET)
        The logger receiving progress.

    Returns
    -------
    list of CorrelationRows
        One row per cell, in enumeration order.
    """
    if not widths or not depths:
        raise InputError('Width and depth ranges must be nonempty')
    cells: List[tuple] = [(index, width, depth) for index, (width, depth)
        in enumerate((width, depth) for width in widths for depth in depths)]

    def measure(cell: tuple) -> CorrelationRow:
        index, width, depth = cell
        arch: Architecture = Architecture.constant_width(width, depth, io_dim = traj.dim)
        net: Network = sample_network(arch, sigma_w, sigma_b, derive_substream(master_seed, index))
        return CorrelationRow(width, depth, stretch_ratio(net, traj),
            rmt_lower_bound(arch, sigma_w), rmt_trajectory_lower(width, depth, sigma_w),
            exact_upper_bound(net))

    return parallel_map(measure, cells, threads = threads, logger = logger, unit = 'cells')

@dataclass(frozen = True)
class LogLogFit:
    """A least-squares line through (log x, log y)."""

    slope: float
    intercept: float
    correlation: float
    """The Pearson correlation of log x and log y."""

def loglog_fit(x: ArrayLike, y: ArrayLike) -> LogLogFit:
    """Fits log y = slope · log x + intercept by least squares.

    Parameters
    ----------
    x : array_like
        The positive abscissae.
    y : array_like
        The positive ordinates.

    Returns
    -------
    LogLogFit
        The slope, intercept, and correlation of the fit.
    """
    x, y = np.asarray(x, dtype = np.float64), np.asarray(y, dtype = np.float64)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise InputError('Need two equally long sequences of at least 2 values')
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise InputError('Log-log fits need positive values')
    log_x, log_y = np.log(x), np.log(y)
    slope, intercept = np.polyfit(log_x, log_y, 1)
    return LogLogFit(float(slope), float(intercept), float(np.corrcoef(log_x, log_y)[0, 1]))
