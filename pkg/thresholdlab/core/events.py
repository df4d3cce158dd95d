"""Sweep progress notifications shared between the experiment runner and front ends."""

from __future__ import annotations

import threading
from contextlib import contextmanager
from typing import Callable, Iterator, Mapping

from .logger import get_logger

LOGGER = get_logger(__name__)
Handler = Callable[..., None]

SWEEP_STARTED = "sweep:started"
SWEEP_POINT = "sweep:point"
SWEEP_FINISHED = "sweep:finished"


class EventBus:
    """Publish/subscribe registry keyed by event name.

    Handlers run on the publishing thread, outside the registry lock. A handler that raises is
    logged and counted in :attr:`failures`; the remaining handlers still run.
    """

    def __init__(self) -> None:
        self._handlers: dict[str, tuple[Handler, ...]] = {}
        self._lock = threading.Lock()
        self.failures = 0

    def subscribe(self, event: str, handler: Handler) -> Handler:
        with self._lock:
            self._handlers[event] = self._handlers.get(event, ()) + (handler,)
        return handler

    def unsubscribe(self, event: str, handler: Handler) -> None:
        with self._lock:
            current = self._handlers.get(event, ())
            if handler not in current:
                LOGGER.debug("Handler was not subscribed", extra={"event": event})
                return
            remaining = list(current)
            remaining.remove(handler)
            self._handlers[event] = tuple(remaining)

    def handlers(self, event: str) -> tuple[Handler, ...]:
        with self._lock:
            return self._handlers.get(event, ())

    @contextmanager
    def listening(self, handlers: Mapping[str, Handler]) -> Iterator["EventBus"]:
        """Subscribe ``handlers`` for the duration of the block."""

        for event, handler in handlers.items():
            self.subscribe(event, handler)
        try:
            yield self
        finally:
            for event, handler in handlers.items():
                self.unsubscribe(event, handler)

    def publish(self, event: str, *args, **kwargs) -> None:
        for handler in self.handlers(event):
            try:
                handler(*args, **kwargs)
            except Exception:
                with self._lock:
                    self.failures += 1
                LOGGER.exception("Sweep handler raised", extra={"event": event, "handler": repr(handler)})


GLOBAL_BUS = EventBus()


__all__ = ["EventBus", "GLOBAL_BUS", "Handler", "SWEEP_FINISHED", "SWEEP_POINT", "SWEEP_STARTED"]
