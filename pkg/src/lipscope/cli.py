"""A script containing the methods needed for command line integration.
"""

import json
import os
import sys
from dataclasses import dataclass, replace
from statistics import fmean
from typing import Any, Callable, Dict, List, Sequence, Tuple
import click
import numpy as np
from lipscope.bounds import BoundReport, bound_report
from lipscope.config import SCOPES, LipscopeConfig, load_config, read_config, config_loc as cloc
from lipscope.empirics import (
    TRAIN_CONFIG_CODEC, TrainConfig, generate_dataset, mse, norm_comparison_report,
    train_sgd, weight_histogram
)
from lipscope.errors import InputError, NumericError
from lipscope.experiment.config import ExperimentConfig, resolve_config
from lipscope.experiment.output import STDOUT, emit, metadata
from lipscope.experiment.runner import parallel_map
from lipscope.linalg import as_matrix
from lipscope.log import Logger
from lipscope.network import Architecture, Network, load_network, sample_network, save_network
from lipscope.rng import MASK, derive_substream, stream_new
from lipscope.stability import (
    CERTIFICATION_MODES, REFERENCE_STATE_MATRIX, StabilitySystem, certified_count, system_new
)
from lipscope.trajectory import circle_trajectory, expressiveness_correlation, loglog_fit
from lipscope.utils import is_width_depth, parse_int_list, parse_range, parse_width_depth

DEFAULT_SWEEP_WIDTHS: Tuple[int, ...] = tuple(range(10, 101, 10))
"""The hidden widths of a sweep when none are given."""

DEFAULT_SWEEP_DEPTHS: Tuple[int, ...] = tuple(range(1, 9))
"""The hidden-layer counts of a sweep when none are given."""

DEFAULT_TRAJECTORY_WIDTHS: Tuple[int, ...] = tuple(range(30, 101, 10))
"""The hidden widths of the trajectory grid when none are given."""

DEFAULT_TRAJECTORY_DEPTHS: Tuple[int, ...] = tuple(range(3, 9))
"""The hidden-layer counts of the trajectory grid when none are given."""

DEFAULT_STABILITY_ARCHS: Tuple[str, ...] = ('300x1', '100x3', '50x6', '20x15', '10x30')
"""The architectures of the stability experiment when none are given."""

class LipscopeGroup(click.Group):
    """A command group mapping package errors to exit codes: 1 for invalid
    input and usage, 2 for numeric failures."""

    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except click.UsageError as exc:
            exc.exit_code = 1
            raise
        except NumericError as exc:
            Logger().error(str(exc))
            ctx.exit(2)
        except (InputError, OSError) as exc:
            Logger().error(str(exc))
            ctx.exit(1)

@click.group(cls = LipscopeGroup)
def cli() -> None:
    """Lipschitz bounds, stability certificates, and expressiveness
    measures for fully-connected networks.
    """

def main() -> None:
    """Runs the command line interface, exiting with 1 on usage errors."""
    try:
        code: Any = cli.main(prog_name = 'lipscope', standalone_mode = False)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.exceptions.Abort:
        sys.exit(1)
    sys.exit(code if isinstance(code, int) else 0)

def _options(*decorators: Callable) -> Callable:
    """Applies click options in the order written."""
    def wrap(func: Callable) -> Callable:
        for decorator in reversed(decorators):
            func = decorator(func)
        return func
    return wrap

_SEED = click.option('--seed', type = click.IntRange(0, MASK), envvar = 'LIPSCOPE_SEED',
    default = None, help = 'The master seed; defaults to $LIPSCOPE_SEED, else 0.')
_SIGMA_W = click.option('--sigma-w', type = float, default = None,
    help = 'The standard deviation of sampled weights.')
_SIGMA_B = click.option('--sigma-b', type = float, default = None,
    help = 'The standard deviation of sampled biases.')
_TRIALS = click.option('--trials', type = int, default = None,
    help = 'The number of networks sampled per cell or architecture.')
_THREADS = click.option('--threads', type = int, default = None,
    help = 'The number of worker threads; never changes results.')
_ACTIVATION = click.option('--activation', type = str, default = None,
    help = 'One of relu, tanh, sigmoid, hard_tanh, identity.')
_IO_DIM = click.option('--io-dim', type = int, default = None,
    help = 'The input and output width of WIDTHxDEPTH architectures.')
_FORMAT = click.option('--format', 'fmt', type = click.Choice(['csv', 'json']), default = None,
    help = 'The record format.')
_REPRODUCIBLE = click.option('--reproducible', is_flag = True, default = None,
    help = 'Omits the timestamp so reruns are byte-identical.')
_CONFIG = click.option('--config', 'config_path', type = click.Path(dir_okay = False),
    default = None, help = 'A JSON file of experiment options, overridden by flags.')
_VERBOSE = click.option('--verbose', '-v', is_flag = True,
    help = 'When \'true\', displays debug messages.')

def _resolve(command: str, config_path: str | None, **flags: Any) -> ExperimentConfig:
    """Resolves a run's parameters from flags, an experiment file, and the TOML defaults."""
    return resolve_config(command, flags, defaults = load_config().defaults(),
        config_path = config_path)

def parse_architecture(text: str, io_dim: int, activation: str) -> Architecture:
    """Parses an architecture given as a width list '2,300,2' or as the
    'width×depth' shorthand with input and output width `io_dim`.

    Parameters
    ----------
    text : str
        The architecture.
    io_dim : int
        The input and output width of shorthand architectures.
    activation : str
        The name of the activation.

    Returns
    -------
    Architecture
        The parsed architecture.
    """
    if is_width_depth(text):
        width, depth = parse_width_depth(text)
        return Architecture.constant_width(width, depth, io_dim = io_dim, activation = activation)
    return Architecture(tuple(parse_int_list(text)), activation)

def _range_option(text: str | None) -> Tuple[int, ...] | None:
    return None if text is None else tuple(parse_range(text))

@cli.command(name = 'bounds')
@click.option('--net', 'net_file', type = click.Path(exists = True, dir_okay = False),
    default = None, help = 'A network JSON file; otherwise a network is sampled.')
@click.option('--arch', type = str, default = None,
    help = 'The widths to sample, such as 2,300,2 or 300x1.')
@_options(_SIGMA_W, _SIGMA_B, _SEED, _ACTIVATION, _IO_DIM)
@click.option('--out', type = str, default = None, help = 'The output file; standard output by default.')
@click.option('--format', 'fmt', type = click.Choice(['csv', 'json']), default = 'json',
    show_default = True, help = 'The record format.')
@_options(_REPRODUCIBLE, _CONFIG, _VERBOSE)
def bounds(net_file: str | None, arch: str | None, sigma_w: float | None, sigma_b: float | None,
        seed: int | None, activation: str | None, io_dim: int | None, out: str | None,
        fmt: str, reproducible: bool | None, config_path: str | None, verbose: bool) -> None:
    """Prints the exact and estimated Lipschitz bounds of one network."""
    logger: Logger = Logger(verbose = verbose)
    cfg: ExperimentConfig = _resolve('bounds', config_path, sigma_w = sigma_w, sigma_b = sigma_b,
        seed = seed, activation = activation, io_dim = io_dim, out = out, format = fmt,
        reproducible = reproducible, archs = (arch,) if arch else None)

    if net_file is not None:
        logger.debug(f'Reading network from \'{net_file}\'')
        net: Network = load_network(net_file)
    elif cfg.archs:
        net = sample_network(parse_architecture(cfg.archs[0], cfg.io_dim, cfg.activation),
            cfg.sigma_w, cfg.sigma_b, stream_new(cfg.seed))
    else:
        raise click.UsageError('Either --net or --arch is required')

    report: BoundReport = bound_report(net)
    emit(cfg.out, cfg.format, report, metadata(cfg, network = net_file))

@dataclass(frozen = True)
class SweepRow:
    """The bounds of one sampled network of a sweep."""

    width: int
    depth: int
    seed: int
    exact_upper: float
    exact_lower: float
    rmt_upper: float
    rmt_lower: float

@dataclass(frozen = True)
class SweepMeanRow:
    """The per-cell means of a sweep."""

    width: int
    depth: int
    seeds: int
    exact_upper: float
    exact_lower: float
    rmt_upper: float
    rmt_lower: float

def mean_path(path: str) -> str:
    """Returns the location of the aggregate file next to `path`, such as
    'sweep_mean.csv' for 'sweep.csv'."""
    stem, ext = os.path.splitext(path)
    return f'{stem}_mean{ext}'

@cli.command(name = 'sweep')
@click.option('--widths', type = str, default = None,
    help = 'The hidden widths, as start:stop[:step], start..stop, or a list. [default: 10:100:10]')
@click.option('--depths', type = str, default = None,
    help = 'The hidden-layer counts, in the same forms. [default: 1:8]')
@_options(_SIGMA_W, _SIGMA_B, _TRIALS, _SEED, _ACTIVATION, _IO_DIM, _THREADS)
@click.option('--out', type = str, default = 'sweep.csv', show_default = True,
    help = 'The output file; the per-cell means go next to it.')
@_options(_FORMAT, _REPRODUCIBLE, _CONFIG, _VERBOSE)
def sweep(widths: str | None, depths: str | None, sigma_w: float | None, sigma_b: float | None,
        trials: int | None, seed: int | None, activation: str | None, io_dim: int | None,
        threads: int | None, out: str, fmt: str | None, reproducible: bool | None,
        config_path: str | None, verbose: bool) -> None:
    """Samples networks over a width × depth grid and records their bounds.
    Seed index s of every cell samples from the same substream."""
    logger: Logger = Logger(verbose = verbose)
    cfg: ExperimentConfig = _resolve('sweep', config_path, widths = _range_option(widths),
        depths = _range_option(depths), sigma_w = sigma_w, sigma_b = sigma_b, trials = trials,
        seed = seed, activation = activation, io_dim = io_dim, threads = threads, out = out,
        format = fmt, reproducible = reproducible)
    cfg = replace(cfg, widths = cfg.widths or DEFAULT_SWEEP_WIDTHS,
        depths = cfg.depths or DEFAULT_SWEEP_DEPTHS)

    tasks: List[Tuple[int, int, int]] = [(width, depth, index) for width in cfg.widths
        for depth in cfg.depths for index in range(cfg.trials)]

    def measure(task: Tuple[int, int, int]) -> SweepRow:
        width, depth, index = task
        arch: Architecture = Architecture.constant_width(width, depth, io_dim = cfg.io_dim,
            activation = cfg.activation)
        net: Network = sample_network(arch, cfg.sigma_w, cfg.sigma_b,
            derive_substream(cfg.seed, index))
        report: BoundReport = bound_report(net)
        return SweepRow(width, depth, index, report.exact_upper, report.exact_lower,
            report.rmt_upper, report.rmt_lower)

    rows: List[SweepRow] = parallel_map(measure, tasks, threads = cfg.threads,
        logger = logger, unit = 'networks')
    means: List[SweepMeanRow] = []
    for begin in range(0, len(rows), cfg.trials):
        cell: Sequence[SweepRow] = rows[begin:begin + cfg.trials]
        means.append(SweepMeanRow(cell[0].width, cell[0].depth, len(cell),
            fmean(row.exact_upper for row in cell), fmean(row.exact_lower for row in cell),
            cell[0].rmt_upper, cell[0].rmt_lower))

    meta: Dict[str, Any] = metadata(cfg)
    emit(cfg.out, cfg.format, rows, meta)
    if cfg.out is None or cfg.out == STDOUT:
        emit(cfg.out, cfg.format, means, meta)
    else:
        emit(mean_path(cfg.out), cfg.format, means, meta)
        logger.success(f'Wrote {len(rows)} rows to \'{cfg.out}\' '
            + f'and {len(means)} cell means to \'{mean_path(cfg.out)}\'')

@dataclass(frozen = True)
class StabilityRow:
    """The certification rate of one architecture."""

    architecture: str
    trials: int
    certified_count: int
    likelihood_percent: float
    threshold: float

def _read_matrix(path: str) -> np.ndarray:
    """Reads a matrix stored as a JSON array of rows."""
    try:
        with open(path, mode = 'r', encoding = 'UTF-8') as file:
            return as_matrix(json.load(file), os.path.basename(path))
    except json.JSONDecodeError as exc:
        raise InputError(f'\'{path}\' is not valid JSON: {exc}') from exc

@cli.command(name = 'stability')
@click.option('--a-file', type = click.Path(exists = True, dir_okay = False), default = None,
    help = 'The state matrix A as a JSON array of rows. [default: [[0,2700],[-3600,-5400]]]')
@click.option('--q-file', type = click.Path(exists = True, dir_okay = False), default = None,
    help = 'The positive definite weight Q as a JSON array of rows. [default: identity]')
@click.option('--arch', 'archs', type = str, multiple = True,
    help = 'An architecture to test, repeatable. [default: 300x1 100x3 50x6 20x15 10x30]')
@click.option('--mode', type = click.Choice(CERTIFICATION_MODES), default = None,
    help = 'The bound compared with the threshold.')
@_options(_SIGMA_W, _SIGMA_B, _TRIALS, _SEED, _ACTIVATION, _THREADS)
@click.option('--out', type = str, default = None, help = 'The output file; standard output by default.')
@_options(_FORMAT, _REPRODUCIBLE, _CONFIG, _VERBOSE)
def stability(a_file: str | None, q_file: str | None, archs: Tuple[str, ...], mode: str | None,
        sigma_w: float | None, sigma_b: float | None, trials: int | None, seed: int | None,
        activation: str | None, threads: int | None, out: str | None, fmt: str | None,
        reproducible: bool | None, config_path: str | None, verbose: bool) -> None:
    """Estimates how often sampled networks are certified to keep
    ẋ = A x + f(x) stable."""
    logger: Logger = Logger(verbose = verbose)
    cfg: ExperimentConfig = _resolve('stability', config_path, archs = archs, mode = mode,
        sigma_w = sigma_w, sigma_b = sigma_b, trials = trials, seed = seed,
        activation = activation, threads = threads, out = out, format = fmt,
        reproducible = reproducible)
    cfg = replace(cfg, archs = cfg.archs or DEFAULT_STABILITY_ARCHS)

    system: StabilitySystem = system_new(
        _read_matrix(a_file) if a_file else REFERENCE_STATE_MATRIX,
        _read_matrix(q_file) if q_file else None)
    logger.debug(f'Safe Lipschitz threshold: {system.threshold:.17g}')

    rows: List[StabilityRow] = []
    for text in cfg.archs:
        arch: Architecture = parse_architecture(text, system.dim, cfg.activation)
        count: int = certified_count(system, arch, cfg.sigma_w, cfg.trials, cfg.seed,
            mode = cfg.mode, sigma_b = cfg.sigma_b, threads = cfg.threads, logger = logger)
        rows.append(StabilityRow(text, cfg.trials, count, 100.0 * count / cfg.trials,
            system.threshold))
        logger.debug(f'{text}: {count}/{cfg.trials} certified')

    emit(cfg.out, cfg.format, rows, metadata(cfg, a = system.a.tolist(), q = system.q.tolist()))

@cli.command(name = 'trajectory')
@click.option('--widths', type = str, default = None,
    help = 'The hidden widths, as start:stop[:step], start..stop, or a list. [default: 30:100:10]')
@click.option('--depths', type = str, default = None,
    help = 'The hidden-layer counts, in the same forms. [default: 3:8]')
@click.option('--points', type = int, default = None,
    help = 'The number of points on the input circle.')
@_options(_SIGMA_W, _SIGMA_B, _SEED, _IO_DIM, _THREADS)
@click.option('--out', type = str, default = None, help = 'The output file; standard output by default.')
@_options(_FORMAT, _REPRODUCIBLE, _CONFIG, _VERBOSE)
def trajectory(widths: str | None, depths: str | None, points: int | None, sigma_w: float | None,
        sigma_b: float | None, seed: int | None, io_dim: int | None, threads: int | None,
        out: str | None, fmt: str | None, reproducible: bool | None, config_path: str | None,
        verbose: bool) -> None:
    """Measures how relu networks stretch a circle, next to the Lipschitz
    estimates of their architectures."""
    logger: Logger = Logger(verbose = verbose)
    cfg: ExperimentConfig = _resolve('trajectory', config_path, widths = _range_option(widths),
        depths = _range_option(depths), points = points, sigma_w = sigma_w, sigma_b = sigma_b,
        seed = seed, io_dim = io_dim, threads = threads, out = out, format = fmt,
        reproducible = reproducible)
    cfg = replace(cfg, widths = cfg.widths or DEFAULT_TRAJECTORY_WIDTHS,
        depths = cfg.depths or DEFAULT_TRAJECTORY_DEPTHS, activation = 'relu')

    rows = expressiveness_correlation(cfg.widths, cfg.depths, cfg.sigma_w, cfg.seed,
        circle_trajectory(max(cfg.io_dim, 2), 1.0, cfg.points), sigma_b = cfg.sigma_b,
        threads = cfg.threads, logger = logger)

    extra: Dict[str, Any] = {}
    if len(rows) >= 2:
        fit = loglog_fit([row.rmt_lower for row in rows], [row.stretch_ratio for row in rows])
        extra['fit'] = {'slope': fit.slope, 'intercept': fit.intercept,
            'correlation': fit.correlation}
        logger.info(f'log-log slope {fit.slope:.4g}, correlation {fit.correlation:.4g}')
    emit(cfg.out, cfg.format, rows, metadata(cfg, **extra))

@cli.command(name = 'train-study')
@click.argument('train_config', type = click.Path(exists = True, dir_okay = False),
    required = False)
@click.option('--out-dir', type = click.Path(file_okay = False), default = 'train_study',
    show_default = True, help = 'The directory receiving every output file.')
@click.option('--hidden', type = int, multiple = True,
    help = 'A hidden width to train, repeatable. [default: 64 256]')
@click.option('--epochs', type = int, default = None, help = 'The number of training epochs.')
@click.option('--learning-rate', type = float, default = None, help = 'The SGD step size.')
@click.option('--bins', type = int, default = 50, show_default = True,
    help = 'The number of histogram bins.')
@_options(_SEED, _THREADS, _REPRODUCIBLE, _VERBOSE)
def train_study(train_config: str | None, out_dir: str, hidden: Tuple[int, ...],
        epochs: int | None, learning_rate: float | None, bins: int, seed: int | None,
        threads: int | None, reproducible: bool | None, verbose: bool) -> None:
    """Trains [2, n, 1] networks and compares the spectral norms of their
    weights with the norms predicted from fitted Gaussians."""
    logger: Logger = Logger(verbose = verbose)
    options: Dict[str, Any] = TRAIN_CONFIG_CODEC.encode(
        TRAIN_CONFIG_CODEC.read(train_config) if train_config else TrainConfig())
    options.update({key: value for key, value in
        {'epochs': epochs, 'learning_rate': learning_rate, 'seed': seed}.items()
        if value is not None})
    base: TrainConfig = TRAIN_CONFIG_CODEC.decode(options)
    hidden = hidden or ((base.arch.widths[1],) if train_config else (64, 256))
    configs: List[TrainConfig] = [base.with_hidden(width) for width in hidden]

    cfg: ExperimentConfig = _resolve('train-study', None, seed = base.seed, threads = threads,
        out = out_dir, reproducible = reproducible,
        archs = tuple(config.arch.label() for config in configs))
    data = generate_dataset(base.dataset_size, base.seed)
    nets: List[Network] = parallel_map(lambda config: train_sgd(config, data, logger), configs,
        threads = cfg.threads, logger = logger, unit = 'networks')

    os.makedirs(out_dir, exist_ok = True)
    meta: Dict[str, Any] = metadata(cfg, train_config = options)
    for config, net in zip(configs, nets):
        width: int = config.arch.widths[1]
        save_network(os.path.join(out_dir, f'network_{width}.json'), net)
        logger.debug(f'Network {width}: training MSE {mse(net, data):.6g}')
        for layer, weight in enumerate(net.weights, start = 1):
            emit(os.path.join(out_dir, f'histogram_{width}_layer{layer}.csv'), 'csv',
                weight_histogram(weight, bins), meta)
    emit(os.path.join(out_dir, 'norm_comparison.csv'), 'csv', norm_comparison_report(nets), meta)
    logger.success(f'Wrote the study of {len(nets)} networks to \'{out_dir}\'')

@cli.group(name = 'config')
def config() -> None:
    """Helpers to generate, read, and write the lipscope.toml defaults.
    """

def _scope_index(scope: str) -> int:
    return SCOPES.index(scope.casefold())

@config.command(name = 'create')
@click.option('--project', '-p', is_flag = True,
    help = 'Generates a config in the current directory.')
@click.option('--site', '-s', is_flag = True,
    help = 'Generates a config for the set environment variable, '
    + 'virtual environment, or user if neither are specified.')
@click.option('--user', '-u', is_flag = True, help = 'Generates a config for the current user.')
@click.option('--global', '-g', '_global', is_flag = True, help = 'Generates a global config.')
@_options(_VERBOSE)
def config_create(project: bool = False, site: bool = False, user: bool = False,
        _global: bool = False, verbose: bool = False) -> None:
    """Creates a configuration for the specified scopes if it doesn't already
    exist. If no scope is specified, a config will be generated in the
    current directory.
    """
    logger: Logger = Logger(verbose = verbose)
    defaults: LipscopeConfig = LipscopeConfig()
    requested: List[bool] = [project or not (project or site or user or _global),
        site, user, _global]

    configs_written: bool = False
    for scope, wanted in enumerate(requested):
        if not wanted:
            continue
        if os.path.exists(config_path := cloc(dirpath = defaults.dirpath, scope = scope)):
            logger.skip(f'Config exists within {SCOPES[scope]} \'{config_path}\'')
        else:
            logger.debug(f'Creating config at {SCOPES[scope]} \'{config_path}\'')
            defaults.write_config(scope = scope)
            configs_written = True

    if configs_written:
        logger.success('Configs have been generated!')
    else:
        logger.skip('Configs are already generated!')

@config.command(name = 'loc')
@click.option('--scope', '-s', type = click.Choice(SCOPES, case_sensitive = False),
    default = 'project', help = 'The configuration to look for.')
def config_location(scope: str = 'project') -> None:
    """Returns the location of the config file, if it exists."""
    logger: Logger = Logger()
    if os.path.exists(config_path := cloc(scope = _scope_index(scope))):
        logger.success(config_path)
    else:
        logger.error(f'No config for {scope}. Create the config using:',
            f'-> lipscope config create --{scope}', sep = '\n')

@config.command(name = 'list')
def config_list() -> None:
    """Lists all available configuration options."""
    top_message: List[str] = ['Available config options']
    top_message += map(lambda s: f'-> {s}', LipscopeConfig().list_vals())
    Logger().success(*top_message, sep = '\n')

@config.command(name = 'value')
@click.argument('name')
@click.argument('value', required = False)
@click.option('--scope', '-s', type = click.Choice(SCOPES, case_sensitive = False),
    default = 'project', help = 'The configuration to read or update.')
def config_value(name: str, value: str | None = None, scope: str = 'project') -> None:
    """Gets the configuration value associated with the name in the
    specified scope. If the value is specified, the name will be updated
    to hold that value.
    """
    logger: Logger = Logger()
    scope_val: int = _scope_index(scope)

    if not os.path.exists(config_path := cloc(scope = scope_val)):
        logger.error(f'No config for {scope}. Create the config using:',
            f'-> lipscope config create --{scope}', sep = '\n')
        raise click.exceptions.Exit(1)

    prj_config: LipscopeConfig = read_config(config_path)
    if value is not None:
        success, val = prj_config.set_val(name, value)
        if success:
            prj_config.write_config(scope = scope_val)
            logger.success(f'[{scope}] {name}: {val}')
            return
    else:
        success, val = prj_config.get_val(name)
        if success:
            logger.success(f'[{scope}] {name} -> {val}')
            return
    logger.error(f'[{scope}] {val}')
    raise click.exceptions.Exit(1)
