"""Cooperative time limits checked between long computation steps."""

from __future__ import annotations

import time

from .errors import ComputationTimeout


class Deadline:
    def __init__(self, seconds: float | None = None):
        self.seconds = seconds
        self._end = None if seconds is None else time.monotonic() + seconds

    def expired(self) -> bool:
        return self._end is not None and time.monotonic() > self._end

    def check(self, where: str = "") -> None:
        if self.expired():
            suffix = f" during {where}" if where else ""
            raise ComputationTimeout(f"time limit of {self.seconds} s exceeded{suffix}")


def check(deadline: Deadline | None, where: str = "") -> None:
    if deadline is not None:
        deadline.check(where)
