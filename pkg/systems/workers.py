"""
Worker pool for independent solver restarts.
Results always come back in submission order, so output does not depend on scheduling.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from settings import THREADS_ENV_VAR
from engine.errors import ConfigError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_thread_count(environ: Optional[dict] = None) -> int:
    """
    Worker count from ELW_LAB_THREADS; 0 or unset means one per CPU.
    """
    environ = os.environ if environ is None else environ
    raw = environ.get(THREADS_ENV_VAR, "0").strip() or "0"
    try:
        requested = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{THREADS_ENV_VAR} must be a non-negative integer, got '{raw}'") from exc
    if requested < 0:
        raise ConfigError(f"{THREADS_ENV_VAR} must be a non-negative integer, got {requested}")
    return requested or (os.cpu_count() or 1)


class RestartPool:
    """Ordered map over a thread pool; a single worker runs inline."""

    def __init__(self, max_workers: int = 1):
        self.max_workers = max(1, int(max_workers))
        self._executor: Optional[ThreadPoolExecutor] = None

    def __enter__(self) -> "RestartPool":
        if self.max_workers > 1:
            self._executor = ThreadPoolExecutor(max_workers=self.max_workers,
                                                thread_name_prefix="elw-restart")
        logger.debug("Workers: pool ready with %d worker(s)", self.max_workers)
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
        if self._executor is None:
            return [fn(item) for item in items]
        return list(self._executor.map(fn, items))
