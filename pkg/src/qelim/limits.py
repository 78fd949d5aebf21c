"""Cooperative resource limits shared by the long-running algorithms."""

from __future__ import annotations

import time


class TimeoutExceeded(Exception):
    """Raised when a computation runs past its deadline."""


class Deadline:
    """A wall-clock budget checked cooperatively at loop boundaries."""

    __slots__ = ("_expires",)

    def __init__(self, timeout_s: float):
        self._expires = time.monotonic() + timeout_s

    @staticmethod
    def from_ms(timeout_ms: int) -> "Deadline":
        return Deadline(timeout_ms / 1000.0)

    def check(self) -> None:
        if time.monotonic() > self._expires:
            raise TimeoutExceeded()

    def expired(self) -> bool:
        return time.monotonic() > self._expires


def check(deadline: Deadline | None) -> None:
    if deadline is not None:
        deadline.check()
