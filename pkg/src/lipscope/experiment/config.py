"""A script containing the fully resolved parameters of one command line run.

Values are resolved with the highest precedence first: command line
flags, then a JSON experiment file, then the layered `lipscope.toml`
defaults, then the built-in defaults below.
"""

import json
from dataclasses import dataclass, fields
from typing import Any, Dict, Tuple
from lipscope.errors import InputError
from lipscope.struct.codec import DictCodec, DictObject
from lipscope.utils import get_or_default

FORMATS: Tuple[str, ...] = ('csv', 'json')
"""The supported record formats."""

@dataclass(frozen = True)
class ExperimentConfig:
    """Every parameter a command used. The encoded form is embedded in
    each record the command writes."""

    command: str
    """The name of the command."""
    seed: int = 0
    """The master seed."""
    sigma_w: float = 1.0
    sigma_b: float = 0.0
    trials: int = 50
    """The number of networks sampled per cell or architecture."""
    threads: int = 1
    activation: str = 'relu'
    io_dim: int = 2
    """The input and output width of 'width×depth' architectures."""
    points: int = 8192
    """The number of points discretizing the input trajectory."""
    mode: str = 'exact'
    widths: Tuple[int, ...] = ()
    """The hidden widths of a sweep."""
    depths: Tuple[int, ...] = ()
    """The hidden-layer counts of a sweep."""
    archs: Tuple[str, ...] = ()
    """Architectures as width lists or 'width×depth' shorthands."""
    out: str | None = None
    """The output location; standard output when `None` or '-'."""
    format: str = 'csv'
    reproducible: bool = False
    """When `True`, records carry no timestamp."""

    def __post_init__(self) -> None:
        if self.format not in FORMATS:
            raise InputError(f'Unknown format \'{self.format}\'; expected one of: {", ".join(FORMATS)}')
        if self.trials < 1 or self.threads < 1:
            raise InputError('trials and threads must be at least 1')
        if not self.sigma_w > 0.0 or self.sigma_b < 0.0:
            raise InputError(f'Need sigma_w > 0 and sigma_b >= 0, '
                + f'got {self.sigma_w} and {self.sigma_b}')
        if self.io_dim < 1 or self.points < 8:
            raise InputError('io_dim must be positive and points at least 8')

def _as_bool(value: Any) -> bool:
    """Reads a flag; strings must spell 'true' or 'false' in any case."""
    if isinstance(value, str):
        if value.casefold() not in ('true', 'false'):
            raise ValueError(f'\'{value}\' is not a valid bool')
        return value.casefold() == 'true'
    return bool(value)

_CASTS: Dict[str, Any] = {
    'seed': int, 'sigma_w': float, 'sigma_b': float, 'trials': int, 'threads': int,
    'activation': str, 'io_dim': int, 'points': int, 'mode': str,
    'widths': lambda v: tuple(int(x) for x in v), 'depths': lambda v: tuple(int(x) for x in v),
    'archs': lambda v: tuple(str(x) for x in v), 'out': lambda v: None if v is None else str(v),
    'format': str, 'reproducible': _as_bool
}

class ExperimentConfigCodec(DictCodec[ExperimentConfig]):
    """A codec for :class:`ExperimentConfig`."""

    def encode(self, obj: ExperimentConfig) -> DictObject:
        encoded: DictObject = {}
        for field in fields(obj):
            value: Any = getattr(obj, field.name)
            encoded[field.name] = list(value) if isinstance(value, tuple) else value
        return encoded

    def decode(self, obj: DictObject) -> ExperimentConfig:
        if unknown := sorted(set(obj) - {field.name for field in fields(ExperimentConfig)}):
            raise InputError(f'Unknown experiment options: {", ".join(unknown)}')
        if 'command' not in obj:
            raise InputError('Experiment config is missing \'command\'')
        try:
            return ExperimentConfig(str(obj['command']), **{
                name: cast(get_or_default(obj, name, ExperimentConfig))
                for name, cast in _CASTS.items()
            })
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f'Malformed experiment config: {exc}') from exc

EXPERIMENT_CONFIG_CODEC: ExperimentConfigCodec = ExperimentConfigCodec()
"""The codec for :class:`ExperimentConfig`."""

def read_experiment_file(path: str) -> DictObject:
    """Reads the options of a JSON experiment file.

    Parameters
    ----------
    path : str
        The location of the file.

    Returns
    -------
    dict[str, any]
        The options in the file.
    """
    try:
        with open(path, mode = 'r', encoding = 'UTF-8') as file:
            options: Any = json.load(file)
    except json.JSONDecodeError as exc:
        raise InputError(f'\'{path}\' is not valid JSON: {exc}') from exc
    if not isinstance(options, dict):
        raise InputError(f'\'{path}\' must hold a JSON object')
    return options

def resolve_config(command: str, flags: DictObject, defaults: DictObject | None = None,
        config_path: str | None = None) -> ExperimentConfig:
    """Resolves the parameters of a run. Flags set to `None` or `()` count as not
    given; defaults that are not options of a run are ignored.

    Parameters
    ----------
    command : str
        The name of the command.
    flags : dict[str, any]
        The command line flags.
    defaults : dict[str, any] | None (default None)
        The layered TOML defaults.
    config_path : str | None (default None)
        The location of a JSON experiment file.

    Returns
    -------
    ExperimentConfig
        The resolved parameters.
    """
    names = {field.name for field in fields(ExperimentConfig)}
    values: DictObject = {key: value for key, value in (defaults or {}).items() if key in names}
    if config_path:
        values.update(read_experiment_file(config_path))
    values.update({key: value for key, value in flags.items() if value not in (None, ())})
    values['command'] = command
    return EXPERIMENT_CONFIG_CODEC.decode(values)
