"""Centralized logging utilities with rotating file handlers and a rich console sink."""

from __future__ import annotations

import logging
import logging.handlers
from pathlib import Path
from typing import Optional

from rich.logging import RichHandler

_LOGGER_CACHE: dict[str, logging.Logger] = {}

# Attributes present on every LogRecord; anything else arrived through ``extra``.
_RESERVED = frozenset(vars(logging.makeLogRecord({}))) | {"message", "asctime"}


class StructuredFormatter(logging.Formatter):
    """Formatter that appends ``extra={...}`` payloads as ``key=value`` pairs."""

    def format(self, record: logging.LogRecord) -> str:
        base = super().format(record)
        fields = {k: v for k, v in vars(record).items() if k not in _RESERVED}
        if not fields:
            return base
        rendered = " ".join(f"{key}={value!r}" for key, value in sorted(fields.items()))
        return f"{base} | {rendered}"


def configure_logging(
    level: str,
    log_dir: Optional[Path] = None,
    rotate_megabytes: int = 10,
    rotate_backups: int = 5,
    console: bool = True,
) -> None:
    """Configure global logging handlers."""

    handlers: list[logging.Handler] = []
    if log_dir is not None:
        log_dir.mkdir(parents=True, exist_ok=True)
        logfile = log_dir / "thresholdlab.log"
        file_handler = logging.handlers.RotatingFileHandler(
            logfile, maxBytes=rotate_megabytes * 1024 * 1024, backupCount=rotate_backups, encoding="utf-8"
        )
        file_handler.setFormatter(
            StructuredFormatter("%(asctime)s | %(levelname)s | %(name)s | %(message)s")
        )
        handlers.append(file_handler)

    if console:
        rich_handler = RichHandler(show_path=False, rich_tracebacks=True)
        rich_handler.setFormatter(StructuredFormatter("%(name)s | %(message)s"))
        handlers.append(rich_handler)

    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO), handlers=handlers, force=True
    )


def get_logger(name: str) -> logging.Logger:
    """Get a module-level logger with caching."""

    if name not in _LOGGER_CACHE:
        _LOGGER_CACHE[name] = logging.getLogger(name)
    return _LOGGER_CACHE[name]


__all__ = ["configure_logging", "get_logger", "StructuredFormatter"]
