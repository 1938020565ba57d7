"""
Logging Configuration.

structlog setup shared by the CLI and long-running experiments. Logs go to
stderr so command output on stdout stays clean.

Importing the package installs a WARNING-level default unless structlog was
already configured; the CLI replaces it with the configured level.
"""

import logging
import sys
from typing import Optional, TextIO

import structlog

DEFAULT_LIBRARY_LEVEL = "WARNING"


def configure_logging(
    level: str = "INFO",
    json_logs: bool = False,
    stream: Optional[TextIO] = None,
) -> None:
    """
    Configure structlog.

    Args:
        level: Minimum level name (DEBUG, INFO, WARNING, ERROR).
        json_logs: Render JSON lines instead of the console format.
        stream: Output stream (sys.stderr by default).
    """
    numeric_level = logging.getLevelName(level.upper())
    if not isinstance(numeric_level, int):
        numeric_level = logging.INFO
    stream = stream or sys.stderr

    renderer: structlog.types.Processor
    if json_logs:
        renderer = structlog.processors.JSONRenderer()
    else:
        renderer = structlog.dev.ConsoleRenderer(colors=stream.isatty())

    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(numeric_level),
        logger_factory=structlog.PrintLoggerFactory(file=stream),
        cache_logger_on_first_use=False,
    )


def configure_default_logging(stream: Optional[TextIO] = None) -> bool:
    """
    Install the library default (WARNING, stderr) if structlog is unconfigured.

    Returns:
        True when the default was installed.
    """
    if structlog.is_configured():
        return False
    configure_logging(DEFAULT_LIBRARY_LEVEL, stream=stream)
    return True
