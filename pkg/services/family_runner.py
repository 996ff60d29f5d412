"""
Family Runner - ordered per-form evaluation on a thread pool
"""
import logging
from multiprocessing.pool import ThreadPool

logger = logging.getLogger(__name__)


class FamilyRunner:
    """
    Maps a function over a family and returns results in input order

    With threads=1 everything runs in the calling thread.
    """

    def __init__(self, threads=1):
        if threads < 1:
            raise ValueError(f"threads must be >= 1, got {threads}")
        self.threads = threads

    def __call__(self, fn, items):
        return self.map(fn, items)

    def map(self, fn, items):
        items = list(items)
        if self.threads == 1 or len(items) < 2:
            return [fn(item) for item in items]
        workers = min(self.threads, len(items))
        logger.debug("evaluating %d items on %d threads", len(items), workers)
        with ThreadPool(processes=workers) as pool:
            return pool.map(fn, items, chunksize=1)
