"""Deterministic Lloyd k-means over descriptor rows.

Pinned rules (the oracle in the tests mirrors them exactly):

* initialization draws K distinct sample indices from
  ``np.random.default_rng(seed)`` via ``choice(n, size=k, replace=False)``;
* assignment uses squared L2 against the f32-rounded centroids, ties to the
  lowest centroid index;
* an empty cluster (ascending index order) is re-seeded to the sample
  farthest from its assigned centroid (ties to the lowest sample index);
  that sample is reassigned to the cluster and excluded from further
  re-seeding this round;
* centroid update is the exact mean of the assigned f32 samples, accumulated
  in f64 in ascending sample order;
* stops when an assignment pass repeats the previous labels, or after
  ``max_iters`` passes.

The per-iteration objective (sum of squared distances to the assigned
centroid) is non-increasing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import parallel
from ..variants import LoopVariant
from .kernels import assign_nearest

__all__ = ["Dictionary", "kmeans", "lloyd_iterations"]


@dataclass(frozen=True)
class Dictionary:
    """Visual words: one centroid row per word."""

    centroids: np.ndarray = field(repr=False)  # (k, dim) f32

    def __post_init__(self):
        arr = np.ascontiguousarray(self.centroids, dtype=np.float32)
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise ValueError(f"centroids must be (k, dim) with k >= 1, got {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("centroids must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "centroids", arr)

    @property
    def k(self) -> int:
        return self.centroids.shape[0]

    @property
    def dim(self) -> int:
        return self.centroids.shape[1]


def _assign_banded(samples_f32, cents_f32, variant, run_parallel: bool):
    n = samples_f32.shape[0]
    labels = np.empty(n, dtype=np.int64)
    dists = np.empty(n, dtype=np.float32)
    if run_parallel and parallel.get_worker_count() > 1 and n >= 2:
        grain = max(1, -(-n // parallel.get_worker_count()))
        parallel.parallel_for(
            parallel.RangeJob(0, n, grain),
            lambda lo, hi: assign_nearest(
                samples_f32, cents_f32, variant, row_range=(lo, hi), out=(labels, dists)
            ),
        )
    else:
        assign_nearest(samples_f32, cents_f32, variant, out=(labels, dists))
    return labels, dists


def lloyd_iterations(
    samples: np.ndarray,
    k: int,
    max_iters: int = 40,
    seed: int = 0,
    variant: LoopVariant | str = LoopVariant.NARROW,
    run_parallel: bool = False,
) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """Full Lloyd run; returns (centroids f32, labels, per-iteration objective)."""
    samples = np.ascontiguousarray(samples, dtype=np.float32)
    n = samples.shape[0]
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if n < k:
        raise ValueError(f"need at least k={k} samples, got {n}")
    if max_iters < 1:
        raise ValueError(f"max_iters must be >= 1, got {max_iters}")
    variant = LoopVariant.parse(variant)

    rng = np.random.default_rng(seed)
    init = rng.choice(n, size=k, replace=False)
    cents = samples[init].astype(np.float64)

    samples64 = samples.astype(np.float64)
    prev_labels = None
    objective: list[float] = []
    labels = np.zeros(n, dtype=np.int64)
    for _ in range(max_iters):
        cents_f32 = cents.astype(np.float32)
        labels, dists = _assign_banded(samples, cents_f32, variant, run_parallel)

        counts = np.bincount(labels, minlength=k)
        if (counts == 0).any():
            dists = dists.copy()
            for c in np.flatnonzero(counts == 0):
                far = int(np.argmax(dists))
                labels[far] = c
                dists[far] = 0.0
                cents[c] = samples64[far]
            counts = np.bincount(labels, minlength=k)

        objective.append(float(np.sum(dists, dtype=np.float64)))
        if prev_labels is not None and np.array_equal(labels, prev_labels):
            break
        sums = np.zeros((k, samples.shape[1]), dtype=np.float64)
        np.add.at(sums, labels, samples64)
        cents = sums / counts[:, None]
        prev_labels = labels
    return cents.astype(np.float32), labels, objective


def kmeans(
    samples: np.ndarray,
    k: int,
    max_iters: int = 40,
    seed: int = 0,
    variant: LoopVariant | str = LoopVariant.NARROW,
    run_parallel: bool = False,
) -> Dictionary:
    """Cluster descriptor rows into a k-word dictionary."""
    cents, _, _ = lloyd_iterations(samples, k, max_iters, seed, variant, run_parallel)
    return Dictionary(cents)
