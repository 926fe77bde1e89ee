"""Stage-prefixed logging helpers"""
from __future__ import annotations

import logging
from logging import Logger
from typing import Any, Optional, Protocol


class LoggingCallable(Protocol):
    def __call__(self, msg: str, *args: Any) -> None:
        ...


def _prefixed(log: Optional[Logger], prefix: str, level: int) -> LoggingCallable:
    if log:

        def log_message(msg: str, *args) -> None:
            log.log(level, "[%s] " + msg, prefix, *args)

        return log_message

    else:

        def do_nothing(msg: str, *args) -> None:  # pylint: disable=unused-argument
            pass

        return do_nothing


def log_info(log: Optional[Logger], prefix: str) -> LoggingCallable:
    "Define a function to send a prefixed info message"
    return _prefixed(log, prefix, logging.INFO)


def log_warning(log: Optional[Logger], prefix: str) -> LoggingCallable:
    "Define a function to send a prefixed warning"
    return _prefixed(log, prefix, logging.WARNING)


def configure(debug: bool) -> None:
    """Install the root handler used by the command line"""
    logging.basicConfig(
        level=logging.INFO if debug else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
