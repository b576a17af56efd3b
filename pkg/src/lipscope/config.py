"""A script containing the layered defaults of the command line tools.

Defaults are read from `lipscope.toml` files. Settings missing from the
project file are merged from the environment variable directory, the
virtual environment if present, the user, and finally the global scope.
"""

import sys
import os
from typing import Any, Dict, List, Tuple
from platformdirs import site_config_dir, user_config_dir
from tomlkit import table, document, comment, item, TOMLDocument, load, dump
from tomlkit.items import Table
from lipscope.errors import InputError
from lipscope.struct.codec import DictObject

_ENV_VAR: str = 'LIPSCOPE_CONFIG_DIR'
"""The environment variable pointing to the config directory."""

_CONFIG_DIR: str = 'lipscope'
"""The config directory for lipscope."""

_CONFIG_FILE: str = 'lipscope.toml'
"""The name of the config file."""

SCOPES: Tuple[str, ...] = ('project', 'site', 'user', 'global')
"""The config scopes, indexed by their scope number."""

def _project_config(dirpath: str, path: str) -> str:
    """Returns the path relative to the project configuration."""
    return os.sep.join([dirpath, path])

def _env_var_config(path: str) -> str | None:
    """Returns the path relative to the environment variable configuration,
    or `None` when the variable is unset."""
    if env_dir := os.getenv(_ENV_VAR):
        return os.sep.join([env_dir, path])
    return None

def _site_config(path: str) -> str | None:
    """Returns the path relative to the virtual environment configuration,
    or `None` outside a virtual environment."""
    return os.sep.join([sys.prefix, _CONFIG_DIR, path]) if sys.prefix != sys.base_prefix else None

def _user_config(path: str) -> str:
    """Returns the path relative to the user configuration."""
    return user_config_dir(os.sep.join([_CONFIG_DIR, path]), appauthor = False, roaming = True)

def _global_config(path: str) -> str:
    """Returns the path relative to the global configuration."""
    return site_config_dir(os.sep.join([_CONFIG_DIR, path]), appauthor = False, multipath = True)

class ExperimentDefaults:
    """Configurations within the 'experiment' table."""

    def __init__(self, sigma_w: float = 1.0, sigma_b: float = 0.0, trials: int = 50,
            threads: int = 1, activation: str = 'relu', io_dim: int = 2, points: int = 8192,
            mode: str = 'exact') -> None:
        """
        Parameters
        ----------
        sigma_w : float (default 1.0)
            The standard deviation of sampled weights.
        sigma_b : float (default 0.0)
            The standard deviation of sampled biases.
        trials : int (default 50)
            The number of Monte-Carlo trials per architecture.
        threads : int (default 1)
            The number of worker threads.
        activation : str (default 'relu')
            The activation of sampled networks.
        io_dim : int (default 2)
            The input and output width of 'width×depth' architectures.
        points : int (default 8192)
            The number of points discretizing an input trajectory.
        mode : str (default 'exact')
            The bound used by the stability certificate.
        """
        self.sigma_w: float = float(sigma_w)
        self.sigma_b: float = float(sigma_b)
        self.trials: int = int(trials)
        self.threads: int = int(threads)
        self.activation: str = str(activation)
        self.io_dim: int = int(io_dim)
        self.points: int = int(points)
        self.mode: str = str(mode)

    _COMMENTS: Dict[str, str] = {
        'sigma_w': 'Standard deviation of sampled weights',
        'sigma_b': 'Standard deviation of sampled biases',
        'trials': 'Monte-Carlo trials per architecture',
        'threads': 'Worker threads; never changes results',
        'activation': 'One of relu, tanh, sigmoid, hard_tanh, identity',
        'io_dim': 'Input and output width of WIDTHxDEPTH architectures',
        'points': 'Points discretizing the input circle',
        'mode': 'Stability certificate bound: exact or rmt'
    }

    def list_vals(self) -> List[str]:
        """Lists all configuration options.

        Returns
        -------
        list[str]
            A list of all config options.
        """
        return list(self._COMMENTS)

    def encode_toml(self) -> Table:
        """Encodes the 'experiment' config into a table.

        Returns
        -------
        Table
            The encoded 'experiment' config.
        """
        experiment: Table = table()
        experiment.comment('Defaults for sampled networks and Monte-Carlo runs')
        for name, description in self._COMMENTS.items():
            experiment.add(name, item(getattr(self, name)).comment(description))
        return experiment

    @classmethod
    def decode_toml(cls, obj: DictObject) -> 'ExperimentDefaults':
        """Decodes the 'experiment' table.

        Parameters
        ----------
        obj : dict[str, any]
            The encoded 'experiment' table.

        Returns
        -------
        ExperimentDefaults
            The decoded 'experiment' table.
        """
        return ExperimentDefaults(**obj)

class OutputDefaults:
    """Configurations within the 'output' table."""

    def __init__(self, format: str = 'csv', reproducible: bool = False) -> None: # pylint: disable=redefined-builtin
        """
        Parameters
        ----------
        format : str (default 'csv')
            The record format, 'csv' or 'json'.
        reproducible : bool (default False)
            When `True`, omits the timestamp from output metadata.
        """
        self.format: str = str(format)
        self.reproducible: bool = bool(reproducible)

    def list_vals(self) -> List[str]:
        """Lists all configuration options.

        Returns
        -------
        list[str]
            A list of all config options.
        """
        return ['format', 'reproducible']

    def encode_toml(self) -> Table:
        """Encodes the 'output' config into a table.

        Returns
        -------
        Table
            The encoded 'output' config.
        """
        output: Table = table()
        output.comment('Output record settings')
        output.add('format', item(self.format).comment('Record format: csv or json'))
        output.add('reproducible', item(self.reproducible).comment(
            'When true, omits the timestamp so reruns are byte-identical'))
        return output

    @classmethod
    def decode_toml(cls, obj: DictObject) -> 'OutputDefaults':
        """Decodes the 'output' table.

        Parameters
        ----------
        obj : dict[str, any]
            The encoded 'output' table.

        Returns
        -------
        OutputDefaults
            The decoded 'output' table.
        """
        return OutputDefaults(**obj)

class LipscopeConfig:
    """Configurations for lipscope."""

    def __init__(self, experiment: ExperimentDefaults | None = None,
            output: OutputDefaults | None = None, dirpath: str = os.curdir) -> None:
        """
        Parameters
        ----------
        experiment : ExperimentDefaults | None (default None)
            The 'experiment' table; built-in defaults when `None`.
        output : OutputDefaults | None (default None)
            The 'output' table; built-in defaults when `None`.
        dirpath : str (default '.')
            The directory holding the project config.
        """
        self.experiment: ExperimentDefaults = experiment or ExperimentDefaults()
        self.output: OutputDefaults = output or OutputDefaults()
        self.dirpath: str = dirpath

    def list_vals(self) -> List[str]:
        """Lists all configuration options.

        Returns
        -------
        list[str]
            A list of all config options.
        """
        output: List[str] = []
        output += map(lambda s: f'experiment.{s}', self.experiment.list_vals())
        output += map(lambda s: f'output.{s}', self.output.list_vals())
        return output

    def defaults(self) -> DictObject:
        """Flattens both tables into one dictionary of experiment defaults.

        Returns
        -------
        dict[str, any]
            The default of every option, keyed by its name within its table.
        """
        values: DictObject = {}
        for section in (self.experiment, self.output):
            values.update({name: getattr(section, name) for name in section.list_vals()})
        return values

    def get_val(self, name: str) -> Tuple[bool, str]:
        """Gets the value associated with the config name.

        Parameters
        ----------
        name : str
            The key associated with the config value, such as 'experiment.trials'.

        Returns
        -------
        (bool, str)
            A tuple containing whether the operation was successful
            and the associated message.
        """
        if name not in self.list_vals():
            return (False, f'\'{name}\' is not a valid config option.')

        val: Any = self
        for key in name.split('.'):
            val = getattr(val, key)
        return (True, str(val))

    def set_val(self, name: str, new_value: Any) -> Tuple[bool, str]:
        """Sets the value for the associated config name.

        Parameters
        ----------
        name : str
            The key associated with the config value.
        new_value : Any
            The new value, cast to the type of the current value.

        Returns
        -------
        (bool, str)
            A tuple containing whether the operation was successful
            and the associated message.
        """
        if name not in self.list_vals():
            return (False, f'\'{name}\' is not a valid config option.')

        section_name, final_name = name.split('.')
        section: Any = getattr(self, section_name)

        # Store previous value for update and cast type
        prev: Any = getattr(section, final_name)
        try:
            new_value = str(new_value).casefold() == 'true' if isinstance(prev, bool) \
                else type(prev)(new_value)
        except ValueError:
            return (False, f'\'{new_value}\' is not a valid {type(prev).__name__}.')
        setattr(section, final_name, new_value)

        return (True, f'{str(prev)} -> {str(new_value)}')

    def encode_toml(self) -> TOMLDocument:
        """Encodes the configuration.

        Returns
        -------
        TOMLDocument
            The encoded configuration.
        """
        doc: TOMLDocument = document()
        doc.add(comment('The configuration file for lipscope'))
        doc.add('experiment', self.experiment.encode_toml())
        doc.add('output', self.output.encode_toml())
        return doc

    @classmethod
    def decode_toml(cls, obj: DictObject) -> 'LipscopeConfig':
        """Decodes the configuration.

        Parameters
        ----------
        obj : dict[str, any]
            The encoded configuration.

        Returns
        -------
        LipscopeConfig
            The decoded configuration.
        """
        try:
            return LipscopeConfig(
                experiment = ExperimentDefaults.decode_toml(obj.get('experiment', {})),
                output = OutputDefaults.decode_toml(obj.get('output', {})),
                dirpath = obj.get('dirpath', os.curdir)
            )
        except (TypeError, ValueError) as exc:
            raise InputError(f'Invalid lipscope.toml: {exc}') from exc

    def write_config(self, scope: int = 0) -> str:
        """Writes the configuration to a file within the specified scope.

        Parameters
        ----------
        scope : int (default '0')
            A number [0, 3] representing the project, site, user, or global config, respectively.

        Returns
        -------
        str
            The location of the written file.
        """
        output_path: str = config_loc(dirpath = self.dirpath, scope = scope)

        # Create directories that are missing
        if parent := os.path.dirname(output_path):
            os.makedirs(parent, exist_ok = True)

        with open(output_path, mode = 'w', encoding = 'UTF-8', newline = '\n') as file:
            dump(self.encode_toml(), file)
        return output_path

def _update_dict(original: DictObject, merging: DictObject) -> DictObject:
    """Merges the second dictionary into the first without replacing any
    keys.

    Parameters
    ----------
    original : dict[str, any]
        The original dictionary to merge into.
    merging : dict[str, any]
        The dictionary being merged.

    Returns
    -------
    dict[str, any]
        The merged dictionary.
    """
    for key, value in merging.items():
        if key not in original:
            if isinstance(value, dict):
                original[key] = {}
                _update_dict(original[key], value)
            else:
                original[key] = value
        elif isinstance(original[key], dict) and isinstance(value, dict):
            # Fill in table keys the earlier scope left out
            _update_dict(original[key], value)
    return original

def _read_and_update_dict(original: DictObject, path: str | None) -> DictObject:
    """Loads a dictionary, if present, and merges it into the existing
    dictionary.

    Parameters
    ----------
    original : dict[str, any]
        The current dictionary to merge into.
    path : str
        The path of the dictionary being merged.

    Returns
    -------
    dict[str, any]
        The merged dictionary.
    """
    if path and os.path.exists(path):
        with open(path, mode = 'r', encoding = 'UTF-8') as file:
            original = _update_dict(original, load(file).unwrap())
    return original

def load_config(dirpath: str = os.curdir) -> LipscopeConfig:
    """Loads the configuration. Any settings that are not overridden by
    the project get merged from the environment variable, virtual
    environment if present, user, and finally the global scope.

    Parameters
    ----------
    dirpath : str
        The directory holding the project config.

    Returns
    -------
    LipscopeConfig
        The loaded configuration.
    """
    config: DictObject = _read_and_update_dict({}, _project_config(dirpath, f'.{_CONFIG_FILE}'))
    config = _read_and_update_dict(config, _env_var_config(_CONFIG_FILE))
    config = _read_and_update_dict(config, _site_config(_CONFIG_FILE))
    config = _read_and_update_dict(config, _user_config(_CONFIG_FILE))
    config = _read_and_update_dict(config, _global_config(_CONFIG_FILE))

    config['dirpath'] = dirpath
    return LipscopeConfig.decode_toml(config)

def read_config(path: str, dirpath: str = os.curdir) -> LipscopeConfig:
    """Reads a single config file without merging other scopes.

    Parameters
    ----------
    path : str
        The location of the config file.
    dirpath : str
        The directory holding the project config.

    Returns
    -------
    LipscopeConfig
        The configuration in the file.
    """
    with open(path, mode = 'r', encoding = 'UTF-8') as file:
        config: DictObject = load(file).unwrap()
    config['dirpath'] = dirpath
    return LipscopeConfig.decode_toml(config)

def config_loc(dirpath: str = os.curdir, scope: int = 0) -> str:
    """Gets the location of the configuration in the specified scope.

    Parameters
    ----------
    dirpath : str
        The directory holding the project config.
    scope : int (default '0')
        A number [0, 3] representing the project, site, user, or global config, respectively.

    Returns
    -------
    str
        The location of the configuration.
    """
    match scope:
        case 0:
            output_path: str = _project_config(dirpath, f'.{_CONFIG_FILE}')
        case 1:
            # Env var config, then site config, then user config
            if env_var := _env_var_config(_CONFIG_FILE):
                output_path = env_var
            elif site_var := _site_config(_CONFIG_FILE):
                output_path = site_var
            else:
                output_path = _user_config(_CONFIG_FILE)
        case 2:
            output_path = _user_config(_CONFIG_FILE)
        case 3:
            output_path = _global_config(_CONFIG_FILE)
        case _:
            raise InputError(f'Scope {scope} not supported, must be [0,3].')

    return output_path
