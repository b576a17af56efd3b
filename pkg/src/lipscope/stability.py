"""A script containing the Lyapunov stability certificate of a linear
system with a network in the loop, ẋ = A x + f(x).

If A is Hurwitz and P solves P A + Aᵀ P = −Q for a positive definite Q,
then any f with f(0) = 0 whose Lipschitz constant is at most

    λ_min(Q) / (2 λ_max(P))

keeps the origin asymptotically stable. A network is certified when its
Lipschitz upper bound is below this threshold; failing the test means
"not certified", not "unstable".
"""

from dataclasses import dataclass
from typing import Literal
import numpy as np
from numpy.typing import ArrayLike, NDArray
from lipscope.bounds import exact_upper_bound, rmt_upper_bound
from lipscope.errors import (
    InputError, DimensionError, LyapunovError, HurwitzIndeterminateError,
    NotHurwitzError, NotPositiveDefiniteError
)
from lipscope.experiment.runner import parallel_map
from lipscope.linalg import (
    Matrix, as_matrix, is_hurwitz, is_spd, lyapunov_solve, residual_norm, sym_eigs
)
from lipscope.log import Logger, QUIET
from lipscope.network import Architecture, Network, forward, sample_network
from lipscope.rng import derive_substream

CertificationMode = Literal['exact', 'rmt']
"""Which Lipschitz upper bound a certificate compares against the threshold."""

CERTIFICATION_MODES: tuple = ('exact', 'rmt')
"""The supported certification modes."""

RESIDUAL_TOLERANCE: float = 1e-8
"""The largest accepted ‖P A + Aᵀ P + Q‖_F relative to ‖Q‖_F."""

REFERENCE_STATE_MATRIX: Matrix = np.array([[0.0, 2700.0], [-3600.0, -5400.0]])
"""A Hurwitz 2×2 state matrix with eigenvalues −2700 ± i√(9.72·10⁶),
used as the default system of the stability experiment."""
REFERENCE_STATE_MATRIX.setflags(write = False)

@dataclass(frozen = True, eq = False)
class StabilitySystem:
    """A Hurwitz state matrix with its Lyapunov certificate."""

    a: Matrix
    """The state matrix A."""
    q: Matrix
    """The positive definite weight Q."""
    p: Matrix
    """The positive definite solution of P A + Aᵀ P = −Q."""
    threshold: float
    """The largest certifiable Lipschitz constant, λ_min(Q) / (2 λ_max(P))."""

    @property
    def dim(self) -> int:
        """The state dimension."""
        return self.a.shape[0]

def system_new(a: ArrayLike, q: ArrayLike | None = None) -> StabilitySystem:
    """Builds the Lyapunov certificate of a state matrix.

    Parameters
    ----------
    a : Matrix
        The square state matrix; must be Hurwitz.
    q : Matrix | None (default None)
        The symmetric positive definite weight; the identity when `None`.

    Returns
    -------
    StabilitySystem
        The system and its threshold.
    """
    a = as_matrix(a, 'a')
    q = np.eye(a.shape[0]) if q is None else as_matrix(q, 'q')
    if q.shape != a.shape:
        raise DimensionError('Lyapunov weight must match the state matrix', a.shape, q.shape)
    if not is_spd(q):
        raise NotPositiveDefiniteError('q must be positive definite')

    try:
        hurwitz: bool = is_hurwitz(a)
    except HurwitzIndeterminateError:
        # A singular Lyapunov operator means two eigenvalues sum to zero
        hurwitz = False
    if not hurwitz:
        raise NotHurwitzError('State matrix is not Hurwitz')

    p: Matrix = lyapunov_solve(a, q)
    residual, q_norm = residual_norm(a, q, p)
    if residual > RESIDUAL_TOLERANCE * q_norm:
        raise LyapunovError(f'Lyapunov residual {residual:.3e} exceeds '
            + f'{RESIDUAL_TOLERANCE:.0e}·‖Q‖_F')
    if not is_spd(p):
        raise NotPositiveDefiniteError('Lyapunov solution is not positive definite')

    threshold: float = float(sym_eigs(q)[0] / (2.0 * sym_eigs(p)[-1]))
    for mat in (a, q, p):
        mat.setflags(write = False)
    return StabilitySystem(a, q, p, threshold)

def _check_mode(mode: str) -> None:
    if mode not in CERTIFICATION_MODES:
        raise InputError(f'Unknown certification mode \'{mode}\'; '
            + f'expected one of: {", ".join(CERTIFICATION_MODES)}')

def certify_network(system: StabilitySystem, net: Network,
        mode: CertificationMode = 'exact') -> bool:
    """Checks whether a network's Lipschitz upper bound is within the
    system's threshold. A network that does not fix the origin, through
    nonzero biases or an activation with a nonzero value at 0, is never
    certified.

    Parameters
    ----------
    system : StabilitySystem
        The system.
    net : Network
        The network in the loop; its input and output widths must equal
        the state dimension.
    mode : 'exact' | 'rmt' (default 'exact')
        Whether to use the bound from the weights or the architecture
        estimate from `net.sigma_w`.

    Returns
    -------
    bool
        `True` if the network is certified.
    """
    _check_mode(mode)
    if (net.arch.input_dim, net.arch.output_dim) != (system.dim, system.dim):
        raise DimensionError('Network must map the state space to itself',
            (net.arch.input_dim, net.arch.output_dim), (system.dim, system.dim))

    # The origin must stay an equilibrium
    if np.any(forward(net, np.zeros(system.dim))):
        return False
    bound: float = exact_upper_bound(net) if mode == 'exact' \
        else rmt_upper_bound(net.arch, net.sigma_w)
    return bound <= system.threshold

def certified_count(system: StabilitySystem, arch: Architecture, sigma_w: float,
        trials: int, master_seed: int, mode: CertificationMode = 'exact',
        sigma_b: float = 0.0, threads: int = 1, logger: Logger = QUIET) -> int:
    """Samples `trials` networks and counts the certified ones. Trial `t`
    draws its network from `derive_substream(master_seed, t)`.

    Parameters
    ----------
    system : StabilitySystem
        The system.
    arch : Architecture
        The architecture of the sampled networks.
    sigma_w : float
        The weight standard deviation.
    trials : int
        The number of sampled networks.
    master_seed : int
        The master seed.
    mode : 'exact' | 'rmt' (default 'exact')
        The bound used by the certificate.
    sigma_b : float (default 0.0)
        The bias standard deviation.
    threads : int (default 1)
        The number of worker threads.
    logger : Logger (default QUIET)
        The logger receiving progress.

    Returns
    -------
    int
        The number of certified networks.
    """
    if trials < 1:
        raise InputError(f'trials must be at least 1, got {trials}')
    _check_mode(mode)

    def trial(index: int) -> bool:
        net: Network = sample_network(arch, sigma_w, sigma_b, derive_substream(master_seed, index))
        return certify_network(system, net, mode)

    outcomes = parallel_map(trial, range(trials), threads = threads,
        logger = logger, unit = f'{arch.label()} trials')
    return sum(outcomes)

def stability_likelihood(system: StabilitySystem, arch: Architecture, sigma_w: float,
        trials: int, master_seed: int, mode: CertificationMode = 'exact',
        sigma_b: float = 0.0, threads: int = 1, logger: Logger = QUIET) -> float:
    """Estimates the percentage of sampled networks that are certified.
    See :func:`certified_count` for the parameters.

    Returns
    -------
    float
        The percentage of certified networks, in [0, 100].
    """
    count: int = certified_count(system, arch, sigma_w, trials, master_seed, mode = mode,
        sigma_b = sigma_b, threads = threads, logger = logger)
    return 100.0 * count / trials

def lyapunov_derivative(system: StabilitySystem, net: Network,
        x: ArrayLike) -> float | NDArray[np.float64]:
    """Computes d/dt (xᵀ P x) = xᵀ (P A + Aᵀ P) x + 2 xᵀ P f(x) along the
    closed-loop system with `f = net`.

    Parameters
    ----------
    system : StabilitySystem
        The system.
    net : Network
        The network in the loop.
    x : array_like
        A state, or a batch of states as rows.

    Returns
    -------
    float | ndarray
        The derivative at every state.
    """
    states: NDArray[np.float64] = np.asarray(x, dtype = np.float64)
    outputs: NDArray[np.float64] = forward(net, states)
    a, p = system.a, system.p
    linear: NDArray[np.float64] = p @ a + a.T @ p
    if states.ndim == 1:
        return float(states @ linear @ states + 2.0 * states @ p @ outputs)
    return np.einsum('bi,ij,bj->b', states, linear, states) \
        + 2.0 * np.einsum('bi,ij,bj->b', states, p, outputs)

def table_architecture(width: int, depth: int, io_dim: int = 2,
        activation: str = 'relu') -> Architecture:
    """Builds the architecture written 'width×depth': `depth` hidden layers
    of `width` neurons between input and output layers of width `io_dim`."""
    return Architecture.constant_width(width, depth, io_dim = io_dim, activation = activation)
