# quadwish/log.py

"""
The shared ``quadwish`` logger.

Records are rendered by rich on stderr, which leaves stdout to CSV files
and reports. The level follows ``QUADWISH_LOG_LEVEL`` unless a caller
passes one explicitly; `sync_level` re-reads it after settings reload.
"""

from __future__ import annotations

import logging
import threading
from typing import Optional

from rich.console import Console
from rich.logging import RichHandler

LOGGER_NAME = "quadwish"

_console = Console(stderr=True)
_lock = threading.Lock()
_logger: Optional[logging.Logger] = None


def _settings_level() -> str:
    from quadwish.config import get_settings
    return get_settings().log_level


def _handler() -> RichHandler:
    handler = RichHandler(
        console=_console,
        show_path=False,
        rich_tracebacks=True,
        markup=True,
    )
    handler.setFormatter(logging.Formatter("[%(levelname)s] %(message)s"))
    return handler


def setup_logger(level: Optional[str] = None) -> logging.Logger:
    """Attach the rich handler to the 'quadwish' logger once. Safe to call repeatedly."""
    global _logger
    with _lock:
        if _logger is None:
            logger = logging.getLogger(LOGGER_NAME)
            logger.addHandler(_handler())
            logger.propagate = False
            logger.setLevel((level or _settings_level()).upper())
            _logger = logger
        return _logger


def get_logger(level: Optional[str] = None) -> logging.Logger:
    """Return the configured logger, initialising it if necessary."""
    return _logger or setup_logger(level)


def set_level(level: str) -> None:
    get_logger().setLevel(level.upper())


def sync_level() -> None:
    """Apply the level from the current settings."""
    set_level(_settings_level())
