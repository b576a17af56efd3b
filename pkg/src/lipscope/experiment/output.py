"""A script containing the record writers of the command line tools.

CSV records start with a `# {...}` line holding the metadata as JSON,
followed by a header row and the data rows, with LF line endings and
reals printed with 17 significant digits. JSON records are a single
object `{"metadata": ..., "data": ...}`.
"""

import csv
import io
import json
import os
from dataclasses import asdict, fields, is_dataclass
from datetime import datetime, timezone
from typing import Any, Iterable, List, Sequence
import click
from lipscope import __version__
from lipscope.errors import InputError
from lipscope.experiment.config import ExperimentConfig, EXPERIMENT_CONFIG_CODEC
from lipscope.struct.codec import DictObject
from lipscope.utils import format_real

STDOUT: str = '-'
"""The output location naming standard output."""

def metadata(config: ExperimentConfig, **extra: Any) -> DictObject:
    """Builds the metadata record of a run: the resolved config, the tool
    version, the master seed, and the UTC time unless the run is
    reproducible.

    Parameters
    ----------
    config : ExperimentConfig
        The resolved parameters.
    **extra
        Additional entries, such as a derived threshold.

    Returns
    -------
    dict[str, any]
        The metadata.
    """
    record: DictObject = {
        'config': EXPERIMENT_CONFIG_CODEC.encode(config),
        'version': __version__,
        'seed': config.seed
    }
    if not config.reproducible:
        record['timestamp'] = datetime.now(timezone.utc).isoformat(timespec = 'seconds')
    record.update(extra)
    return record

def _cell(value: Any) -> str:
    """Formats one CSV cell."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format_real(value)
    if isinstance(value, (tuple, list)):
        return '-'.join(map(str, value))
    return str(value)

def _as_row(record: Any) -> DictObject:
    """Converts a dataclass or dictionary record to a dictionary."""
    if is_dataclass(record):
        return asdict(record)
    if isinstance(record, dict):
        return record
    raise TypeError(f'Cannot write a record of type {type(record).__name__}')

def header_of(records: Sequence[Any]) -> List[str]:
    """Returns the column names of a list of records, in field order."""
    if not records:
        return []
    first: Any = records[0]
    return [field.name for field in fields(first)] if is_dataclass(first) else list(first)

def render_csv(records: Sequence[Any], meta: DictObject, header: Sequence[str] | None = None) -> str:
    """Renders records as CSV text.

    Parameters
    ----------
    records : sequence of dataclasses or dicts
        The data rows.
    meta : dict[str, any]
        The metadata written on the first line.
    header : sequence of str | None (default None)
        The columns; the fields of the first record when `None`.

    Returns
    -------
    str
        The CSV text.
    """
    columns: List[str] = list(header) if header is not None else header_of(records)
    buffer: io.StringIO = io.StringIO(newline = '')
    buffer.write(f'# {json.dumps(meta, sort_keys = True)}\n')
    writer = csv.writer(buffer, lineterminator = '\n')
    writer.writerow(columns)
    for record in records:
        row: DictObject = _as_row(record)
        writer.writerow([_cell(row[column]) for column in columns])
    return buffer.getvalue()

def render_json(data: Any, meta: DictObject) -> str:
    """Renders records as JSON text.

    Parameters
    ----------
    data : any
        A record, or a sequence of records.
    meta : dict[str, any]
        The metadata.

    Returns
    -------
    str
        The JSON text, ending in a newline.
    """
    if isinstance(data, (list, tuple)):
        payload: Any = [_as_row(record) for record in data]
    else:
        payload = _as_row(data)
    return json.dumps({'metadata': meta, 'data': payload}, indent = 4, sort_keys = True) + '\n'

def write_text(path: str | None, text: str) -> None:
    """Writes text to a file, or to standard output for `None` or '-'.

    Parameters
    ----------
    path : str | None
        The output location.
    text : str
        The text.
    """
    if path is None or path == STDOUT:
        click.echo(text, nl = False)
        return
    if parent := os.path.dirname(path):
        os.makedirs(parent, exist_ok = True)
    with open(path, mode = 'w', encoding = 'UTF-8', newline = '') as file:
        file.write(text)

def emit(path: str | None, fmt: str, records: Any, meta: DictObject,
        header: Sequence[str] | None = None) -> None:
    """Writes records in the requested format.

    Parameters
    ----------
    path : str | None
        The output location; standard output for `None` or '-'.
    fmt : str
        'csv' or 'json'.
    records : any
        A record, or a sequence of records.
    meta : dict[str, any]
        The metadata.
    header : sequence of str | None (default None)
        The CSV columns; the fields of the first record when `None`.
    """
    match fmt:
        case 'csv':
            rows: Sequence[Any] = records if isinstance(records, (list, tuple)) else [records]
            write_text(path, render_csv(rows, meta, header))
        case 'json':
            write_text(path, render_json(records, meta))
        case _:
            raise InputError(f'Unknown format \'{fmt}\'')

def strip_metadata(text: str) -> str:
    """Removes the metadata line from CSV text.

    Parameters
    ----------
    text : str
        The CSV text.

    Returns
    -------
    str
        The text without its leading `#` line.
    """
    return text.split('\n', 1)[1] if text.startswith('#') else text

def read_csv(path: str) -> List[DictObject]:
    """Reads the data rows of a CSV record, skipping the metadata line.
    Values are returned as strings.

    Parameters
    ----------
    path : str
        The location of the file.

    Returns
    -------
    list of dict[str, str]
        The rows, keyed by column.
    """
    with open(path, mode = 'r', encoding = 'UTF-8', newline = '') as file:
        lines: Iterable[str] = (line for line in file if not line.startswith('#'))
        return list(csv.DictReader(lines))
