"""A script containing the trained-weight study: small networks are
trained on a two-input regression task, Gaussians are fitted to their
weight matrices, and the largest singular value predicted from the
fitted spread is compared with the true spectral norm.
"""

from dataclasses import dataclass, replace
from typing import List, Sequence, Tuple
import math
import numpy as np
from numpy.typing import ArrayLike, NDArray
from lipscope.bounds import bai_yin_error
from lipscope.errors import InputError, DimensionError, TrainingDivergenceError
from lipscope.linalg import Matrix, as_matrix, spectral_norm
from lipscope.log import Logger, QUIET
from lipscope.network import Activation, Architecture, Network, get_activation
from lipscope.rng import derive_substream, gaussian_matrix, stream_new
from lipscope.struct.codec import DictCodec, DictObject
from lipscope.utils import get_or_default

INPUT_LOW: float = -2.0
"""The lower end of both input coordinates."""

INPUT_HIGH: float = 2.0
"""The upper end of both input coordinates."""

def target_function(x: ArrayLike) -> NDArray[np.float64]:
    """Computes f(x₁, x₂) = sin(3x₁)·cos(2x₂) + 0.5·x₁x₂ for every row of `x`.

    Parameters
    ----------
    x : array_like
        A point of shape (2,), or points of shape (batch, 2).

    Returns
    -------
    ndarray
        The targets, one per point.
    """
    x = np.asarray(x, dtype = np.float64)
    first, second = x[..., 0], x[..., 1]
    return np.sin(3.0 * first) * np.cos(2.0 * second) + 0.5 * first * second

@dataclass(frozen = True, eq = False)
class Dataset:
    """Regression samples as an input matrix and a target vector."""

    inputs: Matrix
    """The inputs, one sample per row."""
    targets: NDArray[np.float64]
    """The targets, one per sample."""

    def __post_init__(self) -> None:
        inputs: Matrix = as_matrix(self.inputs, 'inputs')
        targets: NDArray[np.float64] = np.array(self.targets, dtype = np.float64).reshape(-1)
        if targets.shape[0] != inputs.shape[0]:
            raise DimensionError('Every input needs one target', inputs.shape, targets.shape)
        object.__setattr__(self, 'inputs', inputs)
        object.__setattr__(self, 'targets', targets)

    def __len__(self) -> int:
        return self.inputs.shape[0]

def generate_dataset(size: int, seed: int) -> Dataset:
    """Draws inputs uniformly from [−2, 2]² and labels them with
    :func:`target_function`.

    Parameters
    ----------
    size : int
        The number of samples.
    seed : int
        The seed of the input stream.

    Returns
    -------
    Dataset
        The samples.
    """
    if size < 1:
        raise InputError(f'Dataset size must be positive, got {size}')
    uniforms: NDArray[np.float64] = stream_new(seed).uniforms(2 * size).reshape(size, 2)
    inputs: Matrix = INPUT_LOW + (INPUT_HIGH - INPUT_LOW) * uniforms
    return Dataset(inputs, target_function(inputs))

@dataclass(frozen = True)
class TrainConfig:
    """The settings of one training run. Networks have a single hidden
    layer between two inputs and one output."""

    arch: Architecture = Architecture((2, 64, 1), 'tanh')
    """The architecture [2, n, 1]."""
    epochs: int = 50
    """The number of passes over the data; 0 returns the initialization."""
    learning_rate: float = 0.01
    """The SGD step size."""
    batch_size: int = 32
    """The number of samples per gradient step."""
    dataset_size: int = 15625
    """The number of generated training samples."""
    seed: int = 0
    """The seed of the data, the initialization, and the shuffling."""

    def __post_init__(self) -> None:
        if len(self.arch.widths) != 3 or self.arch.input_dim != 2 or self.arch.output_dim != 1:
            raise InputError(f'Trained networks must be [2, n, 1], got {list(self.arch.widths)}')
        if self.epochs < 0 or self.batch_size < 1 or self.dataset_size < 1:
            raise InputError('epochs must be nonnegative, and batch_size and dataset_size positive')
        if not self.learning_rate >= 0.0:
            raise InputError(f'learning_rate must be nonnegative, got {self.learning_rate}')

    def with_hidden(self, hidden: int) -> 'TrainConfig':
        """Returns a copy whose hidden layer has `hidden` neurons."""
        return replace(self, arch = Architecture((2, hidden, 1), self.arch.activation))

class TrainConfigCodec(DictCodec[TrainConfig]):
    """A codec for :class:`TrainConfig`. The architecture is stored as
    `widths` and `activation`, like a network document."""

    def encode(self, obj: TrainConfig) -> DictObject:
        return {
            'widths': list(obj.arch.widths),
            'activation': obj.arch.activation,
            'epochs': obj.epochs,
            'learning_rate': obj.learning_rate,
            'batch_size': obj.batch_size,
            'dataset_size': obj.dataset_size,
            'seed': obj.seed
        }

    def decode(self, obj: DictObject) -> TrainConfig:
        default_arch: Architecture = get_or_default({}, 'arch', TrainConfig)
        try:
            arch: Architecture = Architecture(tuple(obj.get('widths', default_arch.widths)),
                obj.get('activation', default_arch.activation))
            return TrainConfig(arch,
                epochs = int(get_or_default(obj, 'epochs', TrainConfig)),
                learning_rate = float(get_or_default(obj, 'learning_rate', TrainConfig)),
                batch_size = int(get_or_default(obj, 'batch_size', TrainConfig)),
                dataset_size = int(get_or_default(obj, 'dataset_size', TrainConfig)),
                seed = int(get_or_default(obj, 'seed', TrainConfig)))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f'Malformed training config: {exc!r}') from exc

TRAIN_CONFIG_CODEC: TrainConfigCodec = TrainConfigCodec()
"""The codec for :class:`TrainConfig`."""

def _backprop(weights: Sequence[Matrix], biases: Sequence[NDArray[np.float64]],
        activation: Activation, inputs: Matrix,
        targets: Matrix) -> Tuple[float, List[Matrix], List[NDArray[np.float64]]]:
    """Computes the mean squared error over a batch and its gradients."""
    preactivations: List[Matrix] = []
    activations: List[Matrix] = [inputs]
    for index, (weight, bias) in enumerate(zip(weights, biases)):
        preactivation: Matrix = activations[-1] @ weight.T + bias
        preactivations.append(preactivation)
        activations.append(preactivation if index == len(weights) - 1
            else activation.apply(preactivation))

    error: Matrix = activations[-1] - targets
    loss: float = float(np.mean(error * error))

    delta: Matrix = 2.0 * error / error.size
    weight_grads: List[Matrix] = [None] * len(weights)
    bias_grads: List[NDArray[np.float64]] = [None] * len(weights)
    for index in range(len(weights) - 1, -1, -1):
        weight_grads[index] = delta.T @ activations[index]
        bias_grads[index] = delta.sum(axis = 0)
        if index > 0:
            delta = (delta @ weights[index]) * activation.derivative(preactivations[index - 1])
    return (loss, weight_grads, bias_grads)

def _as_targets(net: Network, inputs: ArrayLike, targets: ArrayLike) -> Tuple[Matrix, Matrix]:
    inputs = as_matrix(inputs, 'inputs')
    targets = np.asarray(targets, dtype = np.float64).reshape(inputs.shape[0], -1)
    if inputs.shape[1] != net.arch.input_dim or targets.shape[1] != net.arch.output_dim:
        raise DimensionError('Samples do not fit the network', (inputs.shape[1], targets.shape[1]),
            (net.arch.input_dim, net.arch.output_dim))
    return (inputs, targets)

def loss_and_gradients(net: Network, inputs: ArrayLike,
        targets: ArrayLike) -> Tuple[float, List[Matrix], List[NDArray[np.float64]]]:
    """Computes the mean squared error of a network on a batch, and its
    gradients with respect to every weight and bias by backpropagation.

    Parameters
    ----------
    net : Network
        The network.
    inputs : array_like
        The inputs, one sample per row.
    targets : array_like
        The targets, one sample per row (or one value per sample).

    Returns
    -------
    (float, list of Matrix, list of ndarray)
        The loss, the weight gradients, and the bias gradients, input
        layer first.
    """
    inputs, targets = _as_targets(net, inputs, targets)
    return _backprop(net.weights, net.biases, get_activation(net.arch.activation), inputs, targets)

def mse(net: Network, data: Dataset) -> float:
    """Computes the mean squared error of a network on a dataset.

    Parameters
    ----------
    net : Network
        The network.
    data : Dataset
        The samples.

    Returns
    -------
    float
        The mean squared error.
    """
    return loss_and_gradients(net, data.inputs, data.targets)[0]

def initial_network(cfg: TrainConfig) -> Network:
    """Samples the starting point of training: weights N(0, 1/fan_in) from
    `derive_substream(cfg.seed, 0)` and zero biases.

    Only the first layer's scale 1/√2 is recorded as `sigma_w`; the output
    layer is drawn with 1/√n. Architecture estimates computed from the
    recorded `sigma_w` therefore do not describe trained networks.

    Parameters
    ----------
    cfg : TrainConfig
        The training settings.

    Returns
    -------
    Network
        The initial network.
    """
    stream = derive_substream(cfg.seed, 0)
    shapes: List[Tuple[int, int]] = list(zip(cfg.arch.widths[1:], cfg.arch.widths))
    weights: List[Matrix] = [gaussian_matrix(stream, rows, cols, 1.0 / math.sqrt(cols))
        for rows, cols in shapes]
    return Network(cfg.arch, tuple(weights), tuple(np.zeros(rows) for rows, _ in shapes),
        sigma_w = 1.0 / math.sqrt(cfg.arch.input_dim))

def train_sgd(cfg: TrainConfig, data: Dataset, logger: Logger = QUIET) -> Network:
    """Trains a network by mini-batch SGD on the mean squared error. Every
    epoch visits the samples in an order drawn from
    `derive_substream(cfg.seed, 1)`; a trailing partial batch is used as is.

    Parameters
    ----------
    cfg : TrainConfig
        The training settings.
    data : Dataset
        The samples.
    logger : Logger (default QUIET)
        The logger receiving the per-epoch loss and the final loss.

    Returns
    -------
    Network
        The trained network.
    """
    if len(data) == 0:
        raise InputError('Cannot train on an empty dataset')
    start: Network = initial_network(cfg)
    if cfg.epochs == 0:
        return start

    activation: Activation = get_activation(cfg.arch.activation)
    inputs, targets = _as_targets(start, data.inputs, data.targets)
    weights: List[Matrix] = [weight.copy() for weight in start.weights]
    biases: List[NDArray[np.float64]] = [bias.copy() for bias in start.biases]
    shuffle = derive_substream(cfg.seed, 1)

    for epoch in range(1, cfg.epochs + 1):
        order: NDArray[np.intp] = shuffle.permutation(len(data))
        total: float = 0.0
        for begin in range(0, len(data), cfg.batch_size):
            batch: NDArray[np.intp] = order[begin:begin + cfg.batch_size]
            loss, weight_grads, bias_grads = _backprop(weights, biases, activation,
                inputs[batch], targets[batch])
            if not math.isfinite(loss):
                raise TrainingDivergenceError(epoch, cfg.learning_rate)
            total += loss * len(batch)
            for index, (weight_grad, bias_grad) in enumerate(zip(weight_grads, bias_grads)):
                weights[index] -= cfg.learning_rate * weight_grad
                biases[index] -= cfg.learning_rate * bias_grad
        logger.debug(f'Epoch {epoch}/{cfg.epochs}: mean batch loss {total / len(data):.6g}')

    if not all(np.all(np.isfinite(weight)) for weight in weights):
        raise TrainingDivergenceError(cfg.epochs, cfg.learning_rate)
    trained: Network = Network(cfg.arch, tuple(weights), tuple(biases),
        sigma_w = start.sigma_w, sigma_b = start.sigma_b)
    logger.info(f'Trained {cfg.arch.label()} for {cfg.epochs} epochs, '
        + f'training MSE {mse(trained, data):.6g}')
    return trained

@dataclass(frozen = True)
class GaussianFit:
    """A maximum-likelihood normal fit to the entries of a matrix."""

    mean: float
    std: float
    sample_count: int

def fit_gaussian(m: ArrayLike) -> GaussianFit:
    """Fits a normal distribution to all entries of a matrix by maximum
    likelihood; the deviation divides by the entry count.

    Parameters
    ----------
    m : Matrix
        The matrix.

    Returns
    -------
    GaussianFit
        The fitted mean and standard deviation.
    """
    values: NDArray[np.float64] = as_matrix(m).ravel()
    return GaussianFit(float(np.mean(values)), float(np.std(values)), values.size)

def estimated_norm(m: ArrayLike) -> float:
    """Predicts the spectral norm of a matrix from the spread of its
    entries, σ̂(√max(N, n) + √min(N, n)), with the entries mean-centered
    before fitting σ̂.

    Parameters
    ----------
    m : Matrix
        The matrix.

    Returns
    -------
    float
        The predicted spectral norm.
    """
    m = as_matrix(m)
    spread: float = fit_gaussian(m - np.mean(m)).std
    return spread * (math.sqrt(max(m.shape)) + math.sqrt(min(m.shape)))

@dataclass(frozen = True)
class NormComparisonRow:
    """The true and predicted spectral norms of one weight matrix."""

    network: int
    """The 1-based index of the network."""
    layer: int
    """The 1-based index of the weight matrix."""
    rows: int
    cols: int
    true_norm: float
    estimated_norm: float
    relative_error: float
    """|estimated − true| / true."""
    bai_yin_error: float
    """The order σ̂√min(N, n) of the error expected for non-Gaussian entries."""

def norm_comparison_report(nets: Sequence[Network]) -> List[NormComparisonRow]:
    """Compares true and predicted spectral norms for every weight matrix
    of every network.

    Parameters
    ----------
    nets : sequence of Networks
        The networks.

    Returns
    -------
    list of NormComparisonRows
        One row per weight matrix, networks in order and input layer first.
    """
    if not nets:
        raise InputError('Need at least one network to compare')
    rows: List[NormComparisonRow] = []
    for net_index, net in enumerate(nets, start = 1):
        for layer, weight in enumerate(net.weights, start = 1):
            true_norm: float = spectral_norm(weight)
            estimate: float = estimated_norm(weight)
            spread: float = fit_gaussian(weight).std
            rows.append(NormComparisonRow(net_index, layer, weight.shape[0], weight.shape[1],
                true_norm, estimate,
                abs(estimate - true_norm) / true_norm if true_norm > 0.0 else math.inf,
                bai_yin_error(weight.shape[0], weight.shape[1], spread)))
    return rows

@dataclass(frozen = True)
class HistogramBin:
    """One equal-width bin of a weight histogram."""

    bin_center: float
    count: int

def weight_histogram(m: ArrayLike, bins: int) -> List[HistogramBin]:
    """Counts the entries of a matrix in equal-width bins spanning
    [min, max]. A constant matrix puts all of its mass in one bin.

    Parameters
    ----------
    m : Matrix
        The matrix.
    bins : int
        The number of bins, at least 2.

    Returns
    -------
    list of HistogramBins
        The bins in increasing order.
    """
    if bins < 2:
        raise InputError(f'Need at least 2 bins, got {bins}')
    values: NDArray[np.float64] = as_matrix(m).ravel()
    counts, edges = np.histogram(values, bins = bins,
        range = (float(values.min()), float(values.max())))
    centers: NDArray[np.float64] = (edges[:-1] + edges[1:]) / 2.0
    return [HistogramBin(float(center), int(count)) for center, count in zip(centers, counts)]
