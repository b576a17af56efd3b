"""A script containing the parallel map used to run independent
Monte-Carlo trials and sweep cells.
"""

from concurrent.futures import ThreadPoolExecutor, Future, as_completed
from typing import Callable, Dict, List, Sequence, TypeVar
from lipscope.errors import InputError
from lipscope.log import Logger, QUIET

Item = TypeVar('Item')
"""The type of the inputs of a task."""

Result = TypeVar('Result')
"""The type of the outputs of a task."""

def parallel_map(fn: Callable[[Item], Result], items: Sequence[Item], threads: int = 1,
        logger: Logger = QUIET, unit: str = 'tasks') -> List[Result]:
    """Applies a function to every item, optionally on a thread pool. The
    results are returned in the order of `items` regardless of the order
    in which the tasks finish.

    Parameters
    ----------
    fn : (Item) -> Result
        The task. It must not share mutable state with other tasks.
    items : sequence of Items
        The task inputs.
    threads : int (default 1)
        The number of worker threads; 1 runs every task inline.
    logger : Logger (default QUIET)
        The logger receiving the progress counter.
    unit : str (default 'tasks')
        The name of the items in progress messages.

    Returns
    -------
    list of Results
        The result of every item, in input order.
    """
    if threads < 1:
        raise InputError(f'threads must be at least 1, got {threads}')

    total: int = len(items)
    if threads == 1 or total <= 1:
        results: List[Result] = []
        for item in items:
            results.append(fn(item))
            logger.progress(len(results), total, unit)
        return results

    with ThreadPoolExecutor(max_workers = threads) as executor:
        futures: Dict[Future, int] = {executor.submit(fn, item): index
            for index, item in enumerate(items)}
        ordered: List[tuple] = []
        for future in as_completed(futures):
            ordered.append((futures[future], future.result()))
            logger.progress(len(ordered), total, unit)
    ordered.sort(key = lambda pair: pair[0])
    return [result for _, result in ordered]
