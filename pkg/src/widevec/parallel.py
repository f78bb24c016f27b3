"""Deterministic data-parallel loop over an index range.

``parallel_for`` statically splits [begin, end) into grain-sized chunks and
runs them on a bounded set of worker threads.  Bodies must only write into
their own sub-range's output region; under that contract the result is
bit-identical to sequential execution for any worker count.

Worker count defaults to the host's logical cores and honors the
``WIDEVEC_THREADS`` environment variable; ``set_worker_count`` overrides both.
Workers pin themselves to cores best-effort (Linux ``sched_setaffinity``);
``pinning_active()`` reports whether the last parallel call managed to pin.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass
from typing import Callable

__all__ = [
    "RangeJob",
    "parallel_for",
    "set_worker_count",
    "get_worker_count",
    "pinning_supported",
    "pinning_active",
]

ENV_THREADS = "WIDEVEC_THREADS"


def _default_workers() -> int:
    env = os.environ.get(ENV_THREADS, "")
    if env:
        try:
            n = int(env)
            if n >= 1:
                return n
        except ValueError:
            pass
    return os.cpu_count() or 1


_worker_count = _default_workers()
_pinned_last_call = False


@dataclass(frozen=True)
class RangeJob:
    """Half-open index range [begin, end) processed in grain-sized chunks."""

    begin: int
    end: int
    grain: int = 1

    def __post_init__(self):
        if self.begin > self.end:
            raise ValueError(f"begin {self.begin} > end {self.end}")
        if self.grain < 1:
            raise ValueError(f"grain must be >= 1, got {self.grain}")

    def chunks(self) -> list[tuple[int, int]]:
        out = []
        lo = self.begin
        while lo < self.end:
            hi = min(lo + self.grain, self.end)
            out.append((lo, hi))
            lo = hi
        return out


def set_worker_count(n: int) -> None:
    global _worker_count
    if n < 1:
        raise ValueError(f"worker count must be >= 1, got {n}")
    _worker_count = int(n)


def get_worker_count() -> int:
    return _worker_count


def pinning_supported() -> bool:
    return hasattr(os, "sched_setaffinity") and hasattr(os, "sched_getaffinity")


def pinning_active() -> bool:
    """Whether worker pinning succeeded on the most recent parallel call."""
    return _pinned_last_call


def _pin_self(slot: int) -> bool:
    if not pinning_supported():
        return False
    try:
        cores = sorted(os.sched_getaffinity(0))
        os.sched_setaffinity(0, {cores[slot % len(cores)]})
        return True
    except OSError:  # pragma: no cover - platform dependent
        return False


def parallel_for(job: RangeJob, body: Callable[[int, int], None]) -> None:
    """Run ``body(lo, hi)`` for every chunk of ``job``, exactly once each.

    With one worker (or a single chunk) the body runs inline on the calling
    thread.  Worker failures propagate after all workers have stopped; the
    first failing chunk's exception is re-raised.
    """
    global _pinned_last_call
    chunks = job.chunks()
    if not chunks:
        return
    workers = min(_worker_count, len(chunks))
    if workers <= 1:
        _pinned_last_call = False
        for lo, hi in chunks:
            body(lo, hi)
        return

    errors: list[tuple[int, BaseException]] = []
    lock = threading.Lock()
    pinned = [False] * workers

    def run(slot: int):
        pinned[slot] = _pin_self(slot)
        # block-cyclic static assignment: worker `slot` owns chunks slot,
        # slot+workers, ... - deterministic and queue-free
        for idx in range(slot, len(chunks), workers):
            lo, hi = chunks[idx]
            try:
                body(lo, hi)
            except BaseException as exc:  # noqa: BLE001 - re-raised below
                with lock:
                    errors.append((idx, exc))
                return

    threads = [threading.Thread(target=run, args=(s,)) for s in range(workers)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    _pinned_last_call = all(pinned)
    if errors:
        errors.sort(key=lambda e: e[0])
        raise errors[0][1]
