"""Common helpers for timing, slope fits, tolerance bands and debug hooks."""

from __future__ import annotations

import sys
import time
from contextlib import contextmanager
from typing import Iterator, Sequence

import numpy as np

from .logger import get_logger

LOGGER = get_logger(__name__)


class Stopwatch:
    """Mutable holder filled in by :func:`timed` when the block exits."""

    __slots__ = ("elapsed_ms",)

    def __init__(self) -> None:
        self.elapsed_ms = 0.0


@contextmanager
def timed() -> Iterator[Stopwatch]:
    """Measure wall-clock time of a block in milliseconds."""

    watch = Stopwatch()
    start = time.perf_counter()
    try:
        yield watch
    finally:
        watch.elapsed_ms = (time.perf_counter() - start) * 1e3


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of ``log|y|`` against ``log x``.

    Zero entries of ``y`` are dropped; fewer than two usable points yield ``nan``.
    """

    xs = np.asarray(x, dtype=float)
    ys = np.abs(np.asarray(y, dtype=complex))
    mask = (xs > 0) & (ys > 0)
    if np.count_nonzero(mask) < 2:
        LOGGER.warning("Slope fit needs two positive points", extra={"points": int(np.count_nonzero(mask))})
        return float("nan")
    slope, _ = np.polyfit(np.log(xs[mask]), np.log(ys[mask]), 1)
    return float(slope)


def zero_band(value: complex, scale: float = 1.0, rel: float = 1e-10) -> float:
    """Half-width of the tolerance band used for sign tests around ``value``."""

    return rel * (scale + abs(value))


def sign_with_band(value: float, band: float) -> int:
    """Return -1, 0 or +1, reporting 0 when ``value`` lies inside ``[-band, band]``."""

    if value > band:
        return 1
    if value < -band:
        return -1
    return 0


def install_excepthook() -> None:
    """Install a verbose exception hook for debug sessions."""

    def _hook(exc_type, exc_value, exc_traceback):  # pragma: no cover - interactive behavior
        LOGGER.exception("Unhandled exception", exc_info=(exc_type, exc_value, exc_traceback))
        sys.__excepthook__(exc_type, exc_value, exc_traceback)

    sys.excepthook = _hook


__all__ = ["Stopwatch", "install_excepthook", "loglog_slope", "sign_with_band", "timed", "zero_band"]
