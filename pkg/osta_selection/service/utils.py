# This code is part of OSTA Selection.
#
# (C) Copyright OSTA Selection Developers 2026.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
#
# Any modifications or derivative works of this code must retain this
# copyright notice, and modified files need to carry a notice indicating
# that they have been altered from the originals.

"""Utilities for logging, timestamps and worker pools."""

import contextvars
import logging
import os
from concurrent import futures
from contextlib import contextmanager
from datetime import datetime, timezone
from typing import Any, Callable, Dict, Generator, Iterable, List, Optional, Tuple

import dateutil.parser

LOG_FORMAT = "ts=%(asctime)s level=%(levelname)s logger=%(name)s %(message)s"
LOG_LEVEL_ENV = "OSTA_SELECTION_LOG_LEVEL"
LOG_FILE_ENV = "OSTA_SELECTION_LOG_FILE"

# file capture active in the current context; copied into pool workers
_log_target: contextvars.ContextVar = contextvars.ContextVar("osta_log_target", default=None)


def setup_logger(logger: logging.Logger) -> None:
    """Setup the logger for the package modules with the appropriate level.

    It involves:
        * Use the `OSTA_SELECTION_LOG_LEVEL` environment variable to
          determine the log level to use for the package modules. If an invalid
          level is set, the log level defaults to ``WARNING``. The valid log levels
          are ``DEBUG``, ``INFO``, ``WARNING``, ``ERROR``, and ``CRITICAL``
          (case-insensitive). If the environment variable is not set, then the parent
          logger's level is used, which also defaults to `WARNING`.
        * Use the `OSTA_SELECTION_LOG_FILE` environment variable to specify the
          filename to use when logging messages. If a log file is specified, the log
          messages will not be logged to the screen.
    """
    log_level = os.getenv(LOG_LEVEL_ENV, "")
    log_file = os.getenv(LOG_FILE_ENV, "")

    formatter = logging.Formatter(LOG_FORMAT)

    # Set propagate to `False` since handlers are to be attached.
    logger.propagate = False

    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)
    else:
        stream_handler = logging.StreamHandler()
        stream_handler.setFormatter(formatter)
        logger.addHandler(stream_handler)

    if log_level:
        # Default to `WARNING` if the specified level is not valid.
        level = logging.getLevelName(log_level.upper())
        if not isinstance(level, int):
            logger.warning(
                'level="%s" error=invalid_log_level valid=DEBUG,INFO,WARNING,ERROR,CRITICAL',
                log_level,
            )
            level = logging.WARNING
        logger.debug('The logger is being set to level "%s"', level)
        logger.setLevel(level)


@contextmanager
def log_to_file(path: str, level: int = logging.INFO) -> Generator[None, None, None]:
    """Copy the package's log records of the current context to ``path``.

    The context covers the current thread and the tasks it hands to
    :class:`WorkerPool` or :func:`run_parallel` while the block runs; a nested
    capture takes over its records until it ends. Records below the package
    logger's own level never reach the file; see :func:`log_level`.
    """
    logger = logging.getLogger("osta_selection")
    marker = object()
    handler = logging.FileHandler(path)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler.setLevel(level)
    handler.addFilter(lambda record: _log_target.get() is marker)
    token = _log_target.set(marker)
    logger.addHandler(handler)
    try:
        yield
    finally:
        logger.removeHandler(handler)
        handler.close()
        _log_target.reset(token)


@contextmanager
def log_level(level: int) -> Generator[None, None, None]:
    """Lower the package logger to ``level`` while the block runs, if it is higher."""
    logger = logging.getLogger("osta_selection")
    previous = logger.level
    if previous == logging.NOTSET or previous > level:
        logger.setLevel(level)
    try:
        yield
    finally:
        logger.setLevel(previous)


# converters


def utc_now() -> str:
    """Current UTC time in ISO format with a ``Z`` suffix."""
    return datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")


def str_to_utc(utc_dt: Optional[str]) -> Optional[datetime]:
    """Convert a UTC string to a ``datetime`` object with UTC timezone.

    Args:
        utc_dt: Input UTC string in ISO format.

    Returns:
        A ``datetime`` with the UTC timezone, or ``None`` if the input is ``None``.
    """
    if not utc_dt or not isinstance(utc_dt, str):
        return None
    parsed_dt = dateutil.parser.isoparse(utc_dt)
    return parsed_dt.replace(tzinfo=timezone.utc)


class WorkerPool:
    """Runs one task per item on a bounded thread pool and tracks their outcome.

    Results are keyed by item, so their order never depends on scheduling.
    """

    def __init__(
        self,
        items: Iterable[Any],
        method: Callable[..., Any],
        max_workers: int = 1,
        **kwargs,
    ):
        self._executor = futures.ThreadPoolExecutor(max_workers=max(1, max_workers))
        self._running_tasks = []
        for item in items:
            arguments = item if isinstance(item, tuple) else (item,)
            task = {
                "data": item,
                "future": self._executor.submit(
                    contextvars.copy_context().run, method, *arguments, **kwargs
                ),
            }
            self._running_tasks.append(task)
        self._all_tasks = list(self._running_tasks)
        self._successful_tasks: List[Any] = []
        self._failed_tasks: List[Dict[str, Any]] = []

    def block(self) -> None:
        """Blocks until every task is done."""
        futures.wait([task["future"] for task in self._all_tasks])
        self._executor.shutdown(wait=True)

    def status(self) -> Dict[str, List]:
        """Returns the running, done and failed tasks."""
        new_running_tasks = []
        for task in self._running_tasks:
            if not task["future"].done():
                new_running_tasks.append(task)
                continue
            ex = task["future"].exception()
            if ex is None:
                self._successful_tasks.append(task["data"])
                continue
            self._failed_tasks.append({"data": task["data"], "exception": ex})
        self._running_tasks = new_running_tasks
        return {
            "running": [task["data"] for task in self._running_tasks],
            "done": self._successful_tasks,
            "fail": self._failed_tasks,
        }

    def results(self) -> Tuple[List[Tuple[Any, Any]], List[Dict[str, Any]]]:
        """Wait for all tasks; return ``(item, result)`` pairs in submission order and failures."""
        self.block()
        status = self.status()
        done = [
            (task["data"], task["future"].result())
            for task in self._all_tasks
            if task["future"].exception() is None
        ]
        return done, status["fail"]


def run_parallel(
    items: Iterable[Any], method: Callable[..., Any], workers: int = 1, **kwargs
) -> List[Any]:
    """Map ``method`` over ``items`` and return results in item order.

    Raises:
        The first failure, in item order.
    """
    items = list(items)
    if workers <= 1:
        return [method(*(i if isinstance(i, tuple) else (i,)), **kwargs) for i in items]
    done, failed = WorkerPool(items, method, max_workers=workers, **kwargs).results()
    if failed:
        raise failed[0]["exception"]
    return [result for _, result in done]
