"""A script holding logger methods for the module.
"""

from typing import List
import click

def _log(header: str, *args, sep: str = ' ', **kwargs) -> None:
    """A general logger which applies a header to the first message
    and writes the joined messages to standard error, leaving standard
    output free for data records.

    Parameters
    ----------
    header : str
        The header to prefix to the first message.
    sep : str (default ' ')
        The separator placed between messages.
    """
    args: List[str] = [str(arg) for arg in args]
    args[0] = f'{header}: {args[0]}'
    click.echo(sep.join(args), err = True, **kwargs)

class Logger:
    """A general logger for messages in the module."""

    def __init__(self, verbose: bool = True) -> None:
        """
        Parameters
        ----------
        verbose : bool
            Whether debug messages should be logged.
        """
        self.verbose: bool = verbose

    def skip(self, *args, **kwargs) -> None:
        """Prefixes 'Skip' in front of a message."""
        _log('Skip', *args, **kwargs)

    def info(self, *args, **kwargs) -> None:
        """Prefixes 'Info' in front of a message."""
        _log('Info', *args, **kwargs)

    def error(self, *args, **kwargs) -> bool:
        """Prefixes 'Error' in front of a message."""
        _log('Error', *args, **kwargs)
        return False

    def success(self, *args, **kwargs) -> bool:
        """Prefixes 'Success' in front of a message."""
        _log('Success', *args, **kwargs)
        return True

    def debug(self, *args, **kwargs) -> None:
        """Prefixes 'Debug' in front of a message if
        verbose is enabled."""
        if self.verbose:
            _log('Debug', *args, **kwargs)

    def progress(self, done: int, total: int, unit: str) -> None:
        """Reports a line counter for a long-running loop as a debug message.

        Parameters
        ----------
        done : int
            The number of finished items.
        total : int
            The total number of items.
        unit : str
            The name of the items being counted.
        """
        self.debug(f'{done}/{total} {unit}')

QUIET: Logger = Logger(verbose = False)
"""A logger which drops debug messages; the default for library calls."""
