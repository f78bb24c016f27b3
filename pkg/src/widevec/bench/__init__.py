"""Benchmark harness: five-variant methodology, min-of-N timing, table emission."""

from .records import BenchRecord, BenchVariant, Speedups, min_over, speedups
from .runner import BowParams, ErodeParams, FilterParams, run_benchmark
from .tables import emit
from .timing import clock_resolution, measure

__all__ = [
    "BenchRecord",
    "BenchVariant",
    "BowParams",
    "ErodeParams",
    "FilterParams",
    "Speedups",
    "clock_resolution",
    "emit",
    "measure",
    "min_over",
    "run_benchmark",
    "speedups",
]
