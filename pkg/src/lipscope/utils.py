"""A script containing helper methods used throughout the package.
"""

import re
import inspect
from typing import Any, Dict, Callable, List, Tuple
from lipscope.errors import InputError

def get_default(func: Callable[..., Any], param: str) -> Any | None:
    """Gets the default value of a function parameter, or `None` if not applicable.

    Parameters
    ----------
    func : Callable[..., Any]
        The function to check.
    param : str
        The name of the parameter.

    Returns
    -------
    Any | None
        The default value of the parameter, or `None` if not applicable.
    """
    param_sig: inspect.Parameter = inspect.signature(func).parameters[param]
    return None if param_sig.default is inspect.Parameter.empty else param_sig.default

def get_or_default(dict_obj: Dict[str, Any], key: str, func: Callable[..., Any],
        param: str | None = None) -> Any | None:
    """Gets the value within a dictionary, or the default from the function if none is specified.

    Parameters
    ----------
    dict_obj : Dict[str, Any]
        The dictionary containing the data of an object.
    key : str
        The key to obtain the value of the dictionary from.
    func : Callable[..., Any]
        The function to check the default of if the key does not exist in the dictionary.
    param : str | None (default None)
        The name of the parameter containing the default value. When `None`, defaults to the `key`.

    Returns
    -------
    Any | None
        The value of the key, the default value, or `None`.
    """
    if param is None:
        param: str = key

    return dict_obj[key] if key in dict_obj else get_default(func, param)

def parse_int_list(text: str) -> List[int]:
    """Parses a comma-separated list of integers, such as a layer-width list '2,300,2'.

    Parameters
    ----------
    text : str
        The comma-separated integers.

    Returns
    -------
    list of ints
        The parsed integers.
    """
    try:
        return [int(part) for part in text.split(',') if part.strip()]
    except ValueError as exc:
        raise InputError(f'\'{text}\' is not a comma-separated list of integers') from exc

_RANGE_REGEX: re.Pattern = re.compile(r'^\s*(\d+)\s*(?::|\.\.)\s*(\d+)\s*(?::\s*(\d+)\s*)?$')
"""Matches an inclusive integer range 'start:stop[:step]' or 'start..stop'."""

def parse_range(text: str) -> List[int]:
    """Parses an inclusive integer range. Accepts 'start:stop:step',
    'start..stop' (step 1), or a comma-separated list of values.

    Parameters
    ----------
    text : str
        The range text.

    Returns
    -------
    list of ints
        The values of the range, in order.
    """
    if (match := _RANGE_REGEX.match(text)) is None:
        values: List[int] = parse_int_list(text)
    else:
        start, stop = int(match.group(1)), int(match.group(2))
        step: int = int(match.group(3)) if match.group(3) else 1
        if step < 1 or stop < start:
            raise InputError(f'\'{text}\' is an empty range')
        values = list(range(start, stop + 1, step))

    if not values:
        raise InputError(f'\'{text}\' is an empty range')
    return values

_SHORTHAND_REGEX: re.Pattern = re.compile(r'^\s*(\d+)\s*[x×X*]\s*(\d+)\s*$')
"""Matches the 'width×depth' architecture shorthand."""

def parse_width_depth(text: str) -> Tuple[int, int]:
    """Parses the 'width×depth' shorthand for a constant-width architecture.
    Both 'x' and '×' are accepted as the separator.

    Parameters
    ----------
    text : str
        The shorthand, such as '300x1'.

    Returns
    -------
    (int, int)
        The hidden width and the number of hidden layers.
    """
    if (match := _SHORTHAND_REGEX.match(text)) is None:
        raise InputError(f'\'{text}\' is not of the form WIDTHxDEPTH')
    return (int(match.group(1)), int(match.group(2)))

def format_real(value: float) -> str:
    """Formats a real with 17 significant digits, which round-trips exactly.

    Parameters
    ----------
    value : float
        The value to format.

    Returns
    -------
    str
        The formatted value.
    """
    return format(float(value), '.17g')

def is_width_depth(text: str) -> bool:
    """Returns whether the text is in the 'width×depth' shorthand.

    Parameters
    ----------
    text : str
        The text to check.

    Returns
    -------
    bool
        `True` if :func:`parse_width_depth` accepts the text.
    """
    return _SHORTHAND_REGEX.match(text) is not None
