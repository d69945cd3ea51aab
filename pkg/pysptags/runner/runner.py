import logging
from collections import deque
from collections.abc import Callable, Iterable, Iterator
from concurrent.futures import Future, ProcessPoolExecutor

logger = logging.getLogger(__name__)


class CorpusRunner:
    """Apply a per-record function over a stream of records.

    Results come back in input order. With more than one worker the records are
    farmed out to a process pool, but no more than `window` of them are in flight at
    a time so memory does not grow with the corpus.

    Parameters
    ----------
    workers : int
        Number of worker processes; 1 runs everything in this process
    window : int
        Maximum number of records submitted but not yet yielded
    """

    def __init__(self, workers: int = 1, window: int = 256):
        if workers < 1 or window < 1:
            raise ValueError(
                f"workers and window must be >= 1; got {workers} and {window}"
            )
        self.workers = workers
        self.window = max(window, workers)

    def map[T, R](self, fn: Callable[[T], R], records: Iterable[T]) -> Iterator[R]:
        """Yield `fn(record)` for every record, in order.

        Parameters
        ----------
        fn : Callable[[T], R]
            A picklable (module level) function when `workers` > 1
        records : Iterable[T]
            Records to process, consumed lazily

        Returns
        -------
        Iterator[R]
            One result per record
        """
        if self.workers == 1:
            for record in records:
                yield fn(record)
            return

        logger.debug("Starting %d workers, window %d", self.workers, self.window)
        with ProcessPoolExecutor(max_workers=self.workers) as pool:
            pending: deque[Future[R]] = deque()
            for record in records:
                pending.append(pool.submit(fn, record))
                if len(pending) >= self.window:
                    yield pending.popleft().result()
            while pending:
                yield pending.popleft().result()
