"""Injectable millisecond clocks.

Timed components (publisher, unit emulator, session loop) never call
time.* directly; they take a Clock so tests can run on the emulated
timeline with exact, drift-free timestamps.
"""

from __future__ import annotations

import time
from typing import Protocol, runtime_checkable


@runtime_checkable
class Clock(Protocol):
    def now_ms(self) -> int: ...

    def sleep_until(self, t_ms: int) -> None: ...


class EmulatedClock:
    """Discrete clock for tests: sleep_until jumps straight to the target."""

    def __init__(self, start_ms: int = 0) -> None:
        self._now = int(start_ms)

    def now_ms(self) -> int:
        return self._now

    def sleep_until(self, t_ms: int) -> None:
        if t_ms > self._now:
            self._now = int(t_ms)

    def advance(self, dt_ms: int) -> None:
        if dt_ms < 0:
            raise ValueError("clock cannot move backwards")
        self._now += int(dt_ms)


class RealClock:
    """Monotonic wall clock, zeroed at construction."""

    def __init__(self) -> None:
        self._t0 = time.monotonic()

    def now_ms(self) -> int:
        return int((time.monotonic() - self._t0) * 1000.0)

    def sleep_until(self, t_ms: int) -> None:
        delay = t_ms / 1000.0 - (time.monotonic() - self._t0)
        if delay > 0:
            time.sleep(delay)
