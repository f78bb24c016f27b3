"""Min-of-N wall timing on the monotonic high-resolution clock.

The clock resolution is probed once.  Cells whose single run is faster than
100x the resolution are looped internally; each repetition then records the
loop average, and the minimum over repetitions is reported together with the
loop count used.
"""

from __future__ import annotations

import math
import time
from typing import Callable

__all__ = ["clock_resolution", "measure"]

_resolution: float | None = None


def clock_resolution() -> float:
    """Smallest observable positive tick of time.perf_counter, in seconds."""
    global _resolution
    if _resolution is None:
        best = math.inf
        for _ in range(512):
            a = time.perf_counter()
            b = time.perf_counter()
            while b == a:
                b = time.perf_counter()
            best = min(best, b - a)
        _resolution = best
    return _resolution


def _time_once(fn: Callable[[], None], loops: int) -> float:
    t0 = time.perf_counter()
    for _ in range(loops):
        fn()
    return (time.perf_counter() - t0) / loops


def measure(fn: Callable[[], None], repeats: int, warmup: int = 1) -> tuple[list[float], int]:
    """(per-repetition times, loop count); warm-up runs are excluded."""
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    res = clock_resolution()
    warm = math.inf
    for _ in range(max(1, warmup)):
        warm = min(warm, _time_once(fn, 1))
    floor = 100.0 * res
    loops = 1 if warm >= floor else max(1, math.ceil(floor / max(warm, res)))
    samples = [_time_once(fn, loops) for _ in range(repeats)]
    return samples, loops
