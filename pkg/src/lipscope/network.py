"""A script containing the definition of a fully-connected network:
its architecture, the random sampling of its parameters, its forward
pass, and its JSON representation.

A network with widths [n₀, n₁, ..., n_{L+1}] computes

    h₀ = x,  h_l = σ(W_l h_{l−1} + b_l)  for l = 1..L,
    y = W_{L+1} h_L + b_{L+1}

where σ is an elementwise 1-Lipschitz activation. The output layer is
affine, with no activation.
"""

from dataclasses import dataclass, field
from typing import Callable, List, Sequence, Tuple
import numpy as np
from numpy.typing import NDArray, ArrayLike
from lipscope.errors import InputError, DimensionError
from lipscope.linalg import Matrix, as_matrix, mat_mul
from lipscope.rng import RngStream, gaussian_matrix
from lipscope.struct.codec import DictCodec, DictObject
from lipscope.struct.registry import Registry
from lipscope.utils import get_or_default

Vector = NDArray[np.float64]
"""A real vector, or a batch of row vectors."""

@dataclass(frozen = True)
class Activation:
    """An elementwise, globally 1-Lipschitz activation function."""

    name: str
    """The registered name of the activation."""
    apply: Callable[[Vector], Vector] = field(repr = False)
    """The elementwise map."""
    derivative: Callable[[Vector], Vector] = field(repr = False)
    """The elementwise derivative with respect to the preactivation."""

def _sigmoid(values: Vector) -> Vector:
    # tanh form avoids overflow in exp for large |values|
    return 0.5 * (1.0 + np.tanh(0.5 * values))

def _sigmoid_derivative(values: Vector) -> Vector:
    logistic: Vector = _sigmoid(values)
    return logistic * (1.0 - logistic)

ACTIVATIONS: Registry[Activation] = Registry('activation')
"""The supported activations, keyed by name."""

for _activation in (
    Activation('relu', lambda v: np.maximum(v, 0.0), lambda v: (v > 0.0).astype(np.float64)),
    Activation('tanh', np.tanh, lambda v: 1.0 - np.tanh(v) ** 2),
    Activation('sigmoid', _sigmoid, _sigmoid_derivative),
    Activation('hard_tanh', lambda v: np.clip(v, -1.0, 1.0),
        lambda v: (np.abs(v) < 1.0).astype(np.float64)),
    Activation('identity', lambda v: np.array(v, dtype = np.float64),
        lambda v: np.ones_like(v, dtype = np.float64)),
):
    ACTIVATIONS[_activation.name] = _activation

def get_activation(name: str) -> Activation:
    """Looks up a registered activation.

    Parameters
    ----------
    name : str
        The name of the activation.

    Returns
    -------
    Activation
        The activation.
    """
    try:
        return ACTIVATIONS[name]
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from exc

def activation_apply(activation: Activation | str, values: ArrayLike) -> Vector:
    """Applies an activation elementwise.

    Parameters
    ----------
    activation : Activation | str
        The activation, or its registered name.
    values : array_like
        The preactivations.

    Returns
    -------
    ndarray
        The activations, of the same shape.
    """
    if isinstance(activation, str):
        activation = get_activation(activation)
    return activation.apply(np.asarray(values, dtype = np.float64))

@dataclass(frozen = True)
class Architecture:
    """The layer widths [n₀, ..., n_{L+1}] and the activation of a network."""

    widths: Tuple[int, ...]
    """The width of every layer, input first and output last."""
    activation: str = 'relu'
    """The name of the hidden-layer activation."""

    def __post_init__(self) -> None:
        object.__setattr__(self, 'widths', tuple(int(width) for width in self.widths))
        if len(self.widths) < 2:
            raise InputError(f'An architecture needs input and output widths, got {self.widths}')
        if any(width < 1 for width in self.widths):
            raise InputError(f'Layer widths must be positive, got {self.widths}')
        get_activation(self.activation)

    @classmethod
    def constant_width(cls, width: int, hidden_layers: int, io_dim: int = 2,
            activation: str = 'relu') -> 'Architecture':
        """Builds the architecture [io_dim, width × hidden_layers, io_dim],
        written 'width×depth' in the command-line shorthand.

        Parameters
        ----------
        width : int
            The width of every hidden layer.
        hidden_layers : int
            The number of hidden layers L.
        io_dim : int (default 2)
            The input and output width.
        activation : str (default 'relu')
            The name of the activation.

        Returns
        -------
        Architecture
            The architecture.
        """
        return cls((io_dim, *([width] * hidden_layers), io_dim), activation)

    @property
    def depth(self) -> int:
        """The number of weight layers, L+1."""
        return len(self.widths) - 1

    @property
    def input_dim(self) -> int:
        """The input width n₀."""
        return self.widths[0]

    @property
    def output_dim(self) -> int:
        """The output width n_{L+1}."""
        return self.widths[-1]

    def label(self) -> str:
        """Returns the widths joined by dashes, such as '2-300-2'."""
        return '-'.join(map(str, self.widths))

@dataclass(frozen = True, eq = False)
class Network:
    """A network with concrete weights and biases. Networks are immutable
    once built; `weights[l]` has shape (n_{l+1}, n_l) for l = 0..L."""

    arch: Architecture
    """The architecture."""
    weights: Tuple[Matrix, ...]
    """The weight matrices, input layer first."""
    biases: Tuple[Vector, ...]
    """The bias vectors, input layer first."""
    sigma_w: float = 1.0
    """The standard deviation the weights were sampled with."""
    sigma_b: float = 0.0
    """The standard deviation the biases were sampled with."""

    def __post_init__(self) -> None:
        weights: Tuple[Matrix, ...] = tuple(as_matrix(w, f'weights[{i}]')
            for i, w in enumerate(self.weights))
        biases: Tuple[Vector, ...] = tuple(np.array(b, dtype = np.float64).reshape(-1)
            for b in self.biases)
        for values in biases:
            values.setflags(write = False)
        for values in weights:
            values.setflags(write = False)
        object.__setattr__(self, 'weights', weights)
        object.__setattr__(self, 'biases', biases)

        if len(weights) != self.arch.depth or len(biases) != self.arch.depth:
            raise InputError(f'Architecture {self.arch.label()} needs {self.arch.depth} layers, '
                + f'got {len(weights)} weights and {len(biases)} biases')
        for index, (fan_in, fan_out) in enumerate(zip(self.arch.widths, self.arch.widths[1:])):
            if weights[index].shape != (fan_out, fan_in):
                raise DimensionError(f'weights[{index}] does not fit the architecture',
                    weights[index].shape, (fan_out, fan_in))
            if biases[index].shape != (fan_out,):
                raise DimensionError(f'biases[{index}] does not fit the architecture',
                    biases[index].shape, (fan_out,))
            if not np.all(np.isfinite(biases[index])):
                raise InputError(f'biases[{index}] contains non-finite entries')
        if not self.sigma_w > 0.0 or self.sigma_b < 0.0:
            raise InputError(f'Need sigma_w > 0 and sigma_b >= 0, '
                + f'got {self.sigma_w} and {self.sigma_b}')

    @property
    def depth(self) -> int:
        """The number of weight layers, L+1."""
        return self.arch.depth

    def scaled(self, factor: float) -> 'Network':
        """Returns a copy with every weight multiplied by `factor`.

        Parameters
        ----------
        factor : float
            The scaling factor.

        Returns
        -------
        Network
            The scaled network.
        """
        return Network(self.arch, tuple(factor * w for w in self.weights), self.biases,
            sigma_w = self.sigma_w * abs(factor) if factor else self.sigma_w,
            sigma_b = self.sigma_b)

    def __call__(self, x: ArrayLike) -> Vector:
        return forward(self, x)

def sample_network(arch: Architecture, sigma_w: float, sigma_b: float,
        stream: RngStream) -> Network:
    """Samples a network with i.i.d. N(0, σ_w²) weights and N(0, σ_b²) biases.
    Weights are drawn layer by layer in row-major order, then the biases;
    with σ_b = 0 the biases are exactly zero and nothing is drawn for them.

    Parameters
    ----------
    arch : Architecture
        The architecture.
    sigma_w : float
        The weight standard deviation, positive.
    sigma_b : float
        The bias standard deviation, nonnegative.
    stream : RngStream
        The stream to draw from.

    Returns
    -------
    Network
        The sampled network.
    """
    if not sigma_w > 0.0:
        raise InputError(f'sigma_w must be positive, got {sigma_w}')
    if sigma_b < 0.0:
        raise InputError(f'sigma_b must be nonnegative, got {sigma_b}')

    shapes: List[Tuple[int, int]] = list(zip(arch.widths[1:], arch.widths))
    weights: List[Matrix] = [gaussian_matrix(stream, rows, cols, sigma_w)
        for rows, cols in shapes]
    biases: List[Vector] = [gaussian_matrix(stream, rows, 1, sigma_b).reshape(-1)
        if sigma_b > 0.0 else np.zeros(rows) for rows, _ in shapes]
    return Network(arch, tuple(weights), tuple(biases), sigma_w = sigma_w, sigma_b = sigma_b)

def identity_network(width: int, depth: int, activation: str = 'identity',
        scale: float = 1.0) -> Network:
    """Builds a square network whose weights are all `scale · I` and whose
    biases are zero.

    Parameters
    ----------
    width : int
        The width of every layer.
    depth : int
        The number of weight layers L+1.
    activation : str (default 'identity')
        The name of the activation.
    scale : float (default 1.0)
        The multiple of the identity in every layer.

    Returns
    -------
    Network
        The network.
    """
    arch: Architecture = Architecture((width,) * (depth + 1), activation)
    return Network(arch, tuple(scale * np.eye(width) for _ in range(depth)),
        tuple(np.zeros(width) for _ in range(depth)))

def _as_inputs(net: Network, x: ArrayLike) -> Tuple[Matrix, bool]:
    """Converts a vector or batch of row vectors to a batch, remembering which it was."""
    inputs: NDArray[np.float64] = np.asarray(x, dtype = np.float64)
    single: bool = inputs.ndim == 1
    inputs = inputs.reshape(1, -1) if single else inputs
    if inputs.ndim != 2 or inputs.shape[1] != net.arch.input_dim:
        raise DimensionError('Input does not fit the network', inputs.shape,
            (inputs.shape[0] if inputs.ndim else 1, net.arch.input_dim))
    return (inputs, single)

def forward(net: Network, x: ArrayLike) -> Vector:
    """Evaluates the network on one input or a batch of row inputs.

    Parameters
    ----------
    net : Network
        The network.
    x : array_like
        An input of length n₀, or a batch of shape (batch, n₀).

    Returns
    -------
    ndarray
        The output of length n_{L+1}, or the batch of outputs.
    """
    inputs, single = _as_inputs(net, x)
    activation: Activation = get_activation(net.arch.activation)
    values: Matrix = inputs
    for index, (weight, bias) in enumerate(zip(net.weights, net.biases)):
        values = values @ weight.T + bias
        if index < net.depth - 1:
            values = activation.apply(values)
    return values[0] if single else values

class NetworkCodec(DictCodec[Network]):
    """A codec for the JSON form of a network:
    {"widths", "activation", "sigma_w", "sigma_b", "weights", "biases"},
    with weights as nested row-major arrays."""

    def encode(self, obj: Network) -> DictObject:
        return {
            'widths': list(obj.arch.widths),
            'activation': obj.arch.activation,
            'sigma_w': obj.sigma_w,
            'sigma_b': obj.sigma_b,
            'weights': [weight.tolist() for weight in obj.weights],
            'biases': [bias.tolist() for bias in obj.biases]
        }

    def decode(self, obj: DictObject) -> Network:
        try:
            arch: Architecture = Architecture(tuple(obj['widths']),
                get_or_default(obj, 'activation', Architecture))
            return Network(arch, tuple(obj['weights']), tuple(obj['biases']),
                sigma_w = float(get_or_default(obj, 'sigma_w', Network)),
                sigma_b = float(get_or_default(obj, 'sigma_b', Network)))
        except (KeyError, TypeError) as exc:
            raise InputError(f'Malformed network document: {exc!r}') from exc

NETWORK_CODEC: NetworkCodec = NetworkCodec()
"""The codec for :class:`lipscope.network.Network`."""

def load_network(path: str) -> Network:
    """Reads a network from a JSON file.

    Parameters
    ----------
    path : str
        The location of the file.

    Returns
    -------
    Network
        The network.
    """
    try:
        return NETWORK_CODEC.read(path)
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f'\'{path}\' is not valid JSON: {exc}') from exc

def save_network(path: str, net: Network) -> None:
    """Writes a network to a JSON file.

    Parameters
    ----------
    path : str
        The location of the file.
    net : Network
        The network.
    """
    NETWORK_CODEC.write(path, net)

def stack_product(weights: Sequence[Matrix]) -> Matrix:
    """Multiplies weight matrices right to left, W_{L+1} ··· W₁.

    Parameters
    ----------
    weights : sequence of Matrix
        The weights, input layer first.

    Returns
    -------
    Matrix
        The product.
    """
    product: Matrix = weights[0]
    for weight in weights[1:]:
        product = mat_mul(weight, product)
    return product
