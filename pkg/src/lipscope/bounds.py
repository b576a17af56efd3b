"""A script containing the Lipschitz bounds of a network: the exact
bounds computed from its weights, and the random-matrix estimates that
depend only on the architecture and the weight scale σ_w.

For widths [n₀, ..., n_{L+1}]:

    exact upper   ∏ ‖W_l‖₂
    exact lower   ‖W_{L+1} ··· W₁‖₂
    rmt upper     ∏ σ_w (√n_l + √n_{l−1})
    rmt lower     σ_w^{L+1} (∏_{l=1}^{L} √n_l) (√n_{L+1} + √n₀ + c √n₀)

The exact lower bound is the Lipschitz constant of the same network
with every activation replaced by the identity.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple
import math
from lipscope.errors import InputError
from lipscope.linalg import spectral_norm
from lipscope.network import Architecture, Network, stack_product
from lipscope.struct.codec import DictCodec, DictObject

def exact_upper_bound(net: Network) -> float:
    """Computes the product of the spectral norms of the weights.

    Parameters
    ----------
    net : Network
        The network.

    Returns
    -------
    float
        The upper bound on the Lipschitz constant of `net`.
    """
    return math.prod(spectral_norm(weight) for weight in net.weights)

def exact_lower_bound(net: Network) -> float:
    """Computes the spectral norm of the product of the weights,
    multiplied right to left.

    Parameters
    ----------
    net : Network
        The network.

    Returns
    -------
    float
        The lower bound on the Lipschitz constant of `net`.
    """
    return spectral_norm(stack_product(net.weights))

def _check_sigma(sigma: float) -> None:
    if not sigma > 0.0:
        raise InputError(f'sigma_w must be positive, got {sigma}')

def gaussian_extreme_estimates(rows: int, cols: int, sigma: float) -> Tuple[float, float]:
    """Estimates the expected smallest and largest singular values of a
    `rows × cols` matrix with i.i.d. N(0, σ²) entries.

    Parameters
    ----------
    rows : int
        The larger dimension N.
    cols : int
        The smaller dimension n.
    sigma : float
        The standard deviation of the entries.

    Returns
    -------
    (float, float)
        σ(√N − √n) and σ(√N + √n).
    """
    _check_sigma(sigma)
    if cols < 1:
        raise InputError(f'Matrix dimensions must be positive, got ({rows}, {cols})')
    if rows < cols:
        raise InputError(f'Expected rows >= cols, got ({rows}, {cols}); '
            + 'pass the transposed shape instead')
    return (sigma * (math.sqrt(rows) - math.sqrt(cols)),
        sigma * (math.sqrt(rows) + math.sqrt(cols)))

def rmt_upper_bound(arch: Architecture, sigma_w: float) -> float:
    """Estimates the expected upper bound ∏ ‖W_l‖₂ from the architecture
    alone, using the largest-singular-value estimate of every layer.

    Parameters
    ----------
    arch : Architecture
        The architecture.
    sigma_w : float
        The standard deviation of the weights.

    Returns
    -------
    float
        ∏ σ_w (√n_l + √n_{l−1}).
    """
    _check_sigma(sigma_w)
    return math.prod(gaussian_extreme_estimates(max(fan_in, fan_out),
        min(fan_in, fan_out), sigma_w)[1]
        for fan_in, fan_out in zip(arch.widths, arch.widths[1:]))

def product_matrix_sigma(widths: Sequence[int], sigma_w: float) -> float:
    """Computes the entry standard deviation of the product W_{L+1} ··· W₁
    of independent Gaussian weights by folding in one layer at a time:
    multiplying by a layer whose inputs have width n_{l−1} scales the
    deviation by √n_{l−1} · σ_w.

    Parameters
    ----------
    widths : sequence of ints
        The widths [n₀, ..., n_{L+1}].
    sigma_w : float
        The standard deviation of the weights.

    Returns
    -------
    float
        The standard deviation of the product entries.
    """
    _check_sigma(sigma_w)
    if len(widths) < 2:
        raise InputError(f'Need at least two widths, got {list(widths)}')
    sigma: float = sigma_w
    for inner in widths[1:-1]:
        sigma = math.sqrt(inner) * sigma * sigma_w
    return sigma

def product_matrix_sigma_closed(widths: Sequence[int], sigma_w: float) -> float:
    """Computes σ_w^{L+1} ∏_{l=1}^{L} √n_l, the closed form of
    :func:`product_matrix_sigma`.

    Parameters
    ----------
    widths : sequence of ints
        The widths [n₀, ..., n_{L+1}].
    sigma_w : float
        The standard deviation of the weights.

    Returns
    -------
    float
        The standard deviation of the product entries.
    """
    _check_sigma(sigma_w)
    if len(widths) < 2:
        raise InputError(f'Need at least two widths, got {list(widths)}')
    return sigma_w ** (len(widths) - 1) * math.prod(math.sqrt(width) for width in widths[1:-1])

def rmt_lower_bound(arch: Architecture, sigma_w: float, correction: float = 0.0) -> float:
    """Estimates the expected exact lower bound ‖W_{L+1} ··· W₁‖₂, treating
    the product as a Gaussian matrix with the deviation given by
    :func:`product_matrix_sigma`.

    Parameters
    ----------
    arch : Architecture
        The architecture.
    sigma_w : float
        The standard deviation of the weights.
    correction : float (default 0.0)
        The coefficient c of the additional c·√n₀ term, whose value is
        not known in closed form.

    Returns
    -------
    float
        σ_w^{L+1} (∏ √n_l) (√n_{L+1} + √n₀ + c √n₀).
    """
    if correction < 0.0:
        raise InputError(f'correction must be nonnegative, got {correction}')
    return product_matrix_sigma(arch.widths, sigma_w) \
        * (math.sqrt(arch.output_dim) + (1.0 + correction) * math.sqrt(arch.input_dim))

def upper_growth_threshold(width: int) -> float:
    """Returns 1/(2√n): for constant hidden width n, the upper estimate
    grows with depth exactly when σ_w is at least this value."""
    return 1.0 / (2.0 * math.sqrt(width))

def lower_growth_threshold(width: int) -> float:
    """Returns 1/√n: for constant hidden width n, the lower estimate
    grows with depth exactly when σ_w is at least this value."""
    return 1.0 / math.sqrt(width)

def bai_yin_error(rows: int, cols: int, sigma: float) -> float:
    """Returns σ√min(rows, cols), the order of the error of the largest
    singular value estimate for i.i.d. entries with finite fourth moment."""
    return sigma * math.sqrt(min(rows, cols))

@dataclass(frozen = True)
class BoundReport:
    """The exact and estimated Lipschitz bounds of one network."""

    exact_upper: float
    """The product of the spectral norms of the weights."""
    exact_lower: float
    """The spectral norm of the product of the weights."""
    rmt_upper: float
    """The architecture estimate of the upper bound."""
    rmt_lower: float
    """The architecture estimate of the lower bound."""
    sigma_w: float
    """The standard deviation the weights were sampled with."""
    widths: Tuple[int, ...]
    """The widths of the network."""

def bound_report(net: Network) -> BoundReport:
    """Computes all four bounds of a network. The estimates use the
    network's recorded `sigma_w`.

    Parameters
    ----------
    net : Network
        The network.

    Returns
    -------
    BoundReport
        The bounds.
    """
    return BoundReport(
        exact_upper = exact_upper_bound(net),
        exact_lower = exact_lower_bound(net),
        rmt_upper = rmt_upper_bound(net.arch, net.sigma_w),
        rmt_lower = rmt_lower_bound(net.arch, net.sigma_w),
        sigma_w = net.sigma_w,
        widths = net.arch.widths
    )

class BoundReportCodec(DictCodec[BoundReport]):
    """A codec for :class:`BoundReport`."""

    def encode(self, obj: BoundReport) -> DictObject:
        return {
            'exact_upper': obj.exact_upper,
            'exact_lower': obj.exact_lower,
            'rmt_upper': obj.rmt_upper,
            'rmt_lower': obj.rmt_lower,
            'sigma_w': obj.sigma_w,
            'widths': list(obj.widths)
        }

    def decode(self, obj: DictObject) -> BoundReport:
        try:
            return BoundReport(float(obj['exact_upper']), float(obj['exact_lower']),
                float(obj['rmt_upper']), float(obj['rmt_lower']), float(obj['sigma_w']),
                tuple(int(width) for width in obj['widths']))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f'Malformed bound report: {exc!r}') from exc

BOUND_REPORT_CODEC: BoundReportCodec = BoundReportCodec()
"""The codec for :class:`BoundReport`."""

def loglinear_depth_slope(width: int, sigma_w: float) -> float:
    """Returns log(2σ_w√n), the per-layer increase of log rmt_upper along
    interior layers of constant width n."""
    _check_sigma(sigma_w)
    return math.log(2.0 * sigma_w * math.sqrt(width))
