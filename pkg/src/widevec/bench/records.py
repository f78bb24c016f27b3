"""Benchmark records and speedup derivation.

One record is one measured (workload, variant) cell.  Derived speedups are
always computed from the raw, unrounded min times, never from displayed
values: vectorization speedup = SeqScalar / SeqVector, optimization speedup
= SeqVector / Optim.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..variants import LoopVariant

__all__ = ["BenchVariant", "BenchRecord", "Speedups", "speedups", "min_over"]


class BenchVariant(Enum):
    SEQ_SCALAR = "SeqScalar"
    PAR_SCALAR = "ParScalar"
    SEQ_VECTOR = "SeqVector"
    PAR_VECTOR = "ParVector"
    OPTIM = "Optim"

    @classmethod
    def parse(cls, v: "BenchVariant | str") -> "BenchVariant":
        if isinstance(v, cls):
            return v
        for m in cls:
            if m.value.lower() == str(v).lower():
                return m
        raise ValueError(f"unknown variant {v!r}; expected one of {[m.value for m in cls]}")

    @property
    def loop_variant(self) -> LoopVariant:
        if self in (BenchVariant.SEQ_SCALAR, BenchVariant.PAR_SCALAR):
            return LoopVariant.SCALAR
        if self in (BenchVariant.SEQ_VECTOR, BenchVariant.PAR_VECTOR):
            return LoopVariant.NARROW
        return LoopVariant.WIDE

    @property
    def is_parallel(self) -> bool:
        return self in (BenchVariant.PAR_SCALAR, BenchVariant.PAR_VECTOR, BenchVariant.OPTIM)


# canonical column order for tables
VARIANT_ORDER = (
    BenchVariant.SEQ_SCALAR,
    BenchVariant.PAR_SCALAR,
    BenchVariant.SEQ_VECTOR,
    BenchVariant.PAR_VECTOR,
    BenchVariant.OPTIM,
)


@dataclass
class BenchRecord:
    """One (workload, variant) measurement."""

    suite: str  # "filter" | "erode" | "bow"
    resolution: str  # "1920x1080", "" for bow
    param: str  # kernel "3x3", radius "1", or stage name
    variant: str  # BenchVariant value
    repeats: int = 0
    samples: tuple[float, ...] = ()
    min_time: float | None = None
    loop_count: int = 1
    emulated: bool = False
    pinned: bool = False
    check_failed: str | None = None

    @property
    def workload(self) -> tuple[str, str, str]:
        return (self.suite, self.resolution, self.param)

    @property
    def ok(self) -> bool:
        return self.check_failed is None


def min_over(samples, n: int) -> float:
    """Re-aggregate: min of the first n raw samples (non-increasing in n)."""
    if n < 1 or n > len(samples):
        raise ValueError(f"n must be in 1..{len(samples)}")
    return min(samples[:n])


@dataclass(frozen=True)
class Speedups:
    vectorization: float | None = None  # SeqScalar / SeqVector
    optimization: float | None = None  # SeqVector / Optim


def speedups(records: list[BenchRecord]) -> dict[tuple[str, str, str], Speedups]:
    """Per-workload speedups from unrounded min times; missing baselines -> None."""
    by_workload: dict[tuple[str, str, str], dict[str, BenchRecord]] = {}
    for r in records:
        by_workload.setdefault(r.workload, {})[r.variant] = r

    def t(cell: BenchRecord | None) -> float | None:
        if cell is None or not cell.ok or cell.min_time is None:
            return None
        return cell.min_time

    out = {}
    for wl, cells in by_workload.items():
        seq_scalar = t(cells.get(BenchVariant.SEQ_SCALAR.value))
        seq_vector = t(cells.get(BenchVariant.SEQ_VECTOR.value))
        optim = t(cells.get(BenchVariant.OPTIM.value))
        vect = seq_scalar / seq_vector if seq_scalar and seq_vector else None
        opt = seq_vector / optim if seq_vector and optim else None
        out[wl] = Speedups(vect, opt)
    return out
