# quadwish/cli/commands/common.py

"""
Shared helpers for CLI commands: option parsing and error reporting.

Every failure is printed to stderr as a panel titled with its error
category and ends the process with exit code 1.
"""

from __future__ import annotations

from contextlib import contextmanager
from typing import Iterator, List, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.panel import Panel

from quadwish.config import get_settings
from quadwish.errors import ExperimentConfigError, InvalidDimensionError, QuadwishError
from quadwish.log import get_logger

err_console = Console(stderr=True)
logger = get_logger()


def fail(category: str, message: str) -> None:
    err_console.print(Panel(message, title=f"error: {category}", style="bold red"))
    logger.debug("Command failed (%s): %s", category, message)
    raise typer.Exit(1)


@contextmanager
def reporting_errors() -> Iterator[None]:
    """Translate library, validation and I/O errors into exit code 1."""
    try:
        yield
    except QuadwishError as exc:
        fail(exc.category, str(exc))
    except ValidationError as exc:
        details = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in exc.errors()
        )
        category = "config"
        if any(err["loc"][:1] == ("n",) for err in exc.errors()):
            category = InvalidDimensionError.category
        fail(category, details)
    except OSError as exc:
        fail("io", str(exc))


def parse_grid(text: str) -> List[int]:
    """'1,10,100' -> [1, 10, 100]."""
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ExperimentConfigError(f"--grid must be a comma separated list of integers: {text!r}") from exc


def resolve_seed(seed: Optional[int]) -> int:
    return get_settings().default_seed if seed is None else seed
