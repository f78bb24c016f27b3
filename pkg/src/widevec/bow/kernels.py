"""Squared-distance and dot-product hot loops with selectable lane structure.

All variants share one mandated accumulation layout so results are bitwise
identical: 16 parallel f32 accumulation slots (the f32 lane count of a wide
register group), inputs zero-padded to a multiple of 16, and a final
reduction of the slots in ascending order.  The scalar variant walks the
slots one element at a time, the narrow variant in four 4-lane registers,
the wide variant as one 16-lane group.
"""

from __future__ import annotations

import numpy as np

from .._jit import njit
from ..variants import LoopVariant

__all__ = ["pad_rows", "assign_nearest", "score_batch", "SLOTS"]

SLOTS = 16  # f32 lanes in a 512-bit register group


def pad_rows(a: np.ndarray) -> np.ndarray:
    """Rows zero-padded to a multiple of SLOTS, f32 C-contiguous."""
    a = np.ascontiguousarray(a, dtype=np.float32)
    if a.ndim == 1:
        a = a[None, :]
    n, d = a.shape
    dp = ((d + SLOTS - 1) // SLOTS) * SLOTS
    if dp == d:
        return a
    out = np.zeros((n, dp), dtype=np.float32)
    out[:, :d] = a
    return out


@njit
def _reduce_slots(slots):
    total = np.float32(0.0)
    for j in range(SLOTS):
        total = total + slots[j]
    return total


@njit
def _assign_rows_scalar(samples, cents, labels, dists, i0, i1):
    n_c, d = cents.shape
    slots = np.empty(SLOTS, dtype=np.float32)
    for i in range(i0, i1):
        best = 0
        best_d = np.float32(np.inf)
        for c in range(n_c):
            for j in range(SLOTS):
                s = np.float32(0.0)
                for base in range(0, d, SLOTS):
                    diff = samples[i, base + j] - cents[c, base + j]
                    s = s + diff * diff
                slots[j] = s
            dist = _reduce_slots(slots)
            if dist < best_d:
                best_d = dist
                best = c
        labels[i] = best
        dists[i] = best_d


@njit
def _assign_rows_narrow(samples, cents, labels, dists, i0, i1):
    n_c, d = cents.shape
    slots = np.empty(SLOTS, dtype=np.float32)
    for i in range(i0, i1):
        best = 0
        best_d = np.float32(np.inf)
        for c in range(n_c):
            for j in range(SLOTS):
                slots[j] = np.float32(0.0)
            for base in range(0, d, SLOTS):
                for reg in range(4):  # four narrow f32 registers
                    off = reg * 4
                    for j in range(4):
                        diff = samples[i, base + off + j] - cents[c, base + off + j]
                        slots[off + j] += diff * diff
            dist = _reduce_slots(slots)
            if dist < best_d:
                best_d = dist
                best = c
        labels[i] = best
        dists[i] = best_d


@njit
def _assign_rows_wide(samples, cents, labels, dists, i0, i1):
    n_c, d = cents.shape
    slots = np.empty(SLOTS, dtype=np.float32)
    for i in range(i0, i1):
        best = 0
        best_d = np.float32(np.inf)
        for c in range(n_c):
            for j in range(SLOTS):
                slots[j] = np.float32(0.0)
            for base in range(0, d, SLOTS):
                for j in range(SLOTS):  # one wide register group
                    diff = samples[i, base + j] - cents[c, base + j]
                    slots[j] += diff * diff
            dist = _reduce_slots(slots)
            if dist < best_d:
                best_d = dist
                best = c
        labels[i] = best
        dists[i] = best_d


@njit
def _score_rows_scalar(feats, weights, biases, out, i0, i1):
    n_c, d = weights.shape
    slots = np.empty(SLOTS, dtype=np.float32)
    for i in range(i0, i1):
        for c in range(n_c):
            for j in range(SLOTS):
                s = np.float32(0.0)
                for base in range(0, d, SLOTS):
                    s = s + weights[c, base + j] * feats[i, base + j]
                slots[j] = s
            out[i, c] = _reduce_slots(slots) + biases[c]


@njit
def _score_rows_narrow(feats, weights, biases, out, i0, i1):
    n_c, d = weights.shape
    slots = np.empty(SLOTS, dtype=np.float32)
    for i in range(i0, i1):
        for c in range(n_c):
            for j in range(SLOTS):
                slots[j] = np.float32(0.0)
            for base in range(0, d, SLOTS):
                for reg in range(4):
                    off = reg * 4
                    for j in range(4):
                        slots[off + j] += weights[c, base + off + j] * feats[i, base + off + j]
            out[i, c] = _reduce_slots(slots) + biases[c]


@njit
def _score_rows_wide(feats, weights, biases, out, i0, i1):
    n_c, d = weights.shape
    slots = np.empty(SLOTS, dtype=np.float32)
    for i in range(i0, i1):
        for c in range(n_c):
            for j in range(SLOTS):
                slots[j] = np.float32(0.0)
            for base in range(0, d, SLOTS):
                for j in range(SLOTS):
                    slots[j] += weights[c, base + j] * feats[i, base + j]
            out[i, c] = _reduce_slots(slots) + biases[c]


_ASSIGN = {
    LoopVariant.SCALAR: _assign_rows_scalar,
    LoopVariant.NARROW: _assign_rows_narrow,
    LoopVariant.WIDE: _assign_rows_wide,
}

_SCORE = {
    LoopVariant.SCALAR: _score_rows_scalar,
    LoopVariant.NARROW: _score_rows_narrow,
    LoopVariant.WIDE: _score_rows_wide,
}


def assign_nearest(
    points: np.ndarray,
    centroids: np.ndarray,
    variant: LoopVariant | str = LoopVariant.NARROW,
    row_range: tuple[int, int] | None = None,
    out: tuple[np.ndarray, np.ndarray] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Nearest centroid per row (squared L2, ties to the lowest index).

    Returns (labels int64, squared distances f32).  `row_range` restricts the
    rows processed (for banded parallel execution into shared `out` arrays).
    """
    variant = LoopVariant.parse(variant)
    if points.shape[1] != centroids.shape[1]:
        raise ValueError(f"dimension mismatch: {points.shape[1]} vs {centroids.shape[1]}")
    p = pad_rows(points)
    c = pad_rows(centroids)
    if out is None:
        labels = np.empty(p.shape[0], dtype=np.int64)
        dists = np.empty(p.shape[0], dtype=np.float32)
    else:
        labels, dists = out
    lo, hi = row_range if row_range is not None else (0, p.shape[0])
    _ASSIGN[variant](p, c, labels, dists, lo, hi)
    return labels, dists


def score_batch(
    feats: np.ndarray,
    weights: np.ndarray,
    biases: np.ndarray,
    variant: LoopVariant | str = LoopVariant.NARROW,
) -> np.ndarray:
    """Per-row class scores w_c . x + b_c, (N, classes) f32."""
    variant = LoopVariant.parse(variant)
    if feats.shape[-1] != weights.shape[1]:
        raise ValueError(f"dimension mismatch: {feats.shape[-1]} vs {weights.shape[1]}")
    f = pad_rows(feats)
    w = pad_rows(weights)
    b = np.ascontiguousarray(biases, dtype=np.float32)
    out = np.empty((f.shape[0], w.shape[0]), dtype=np.float32)
    _SCORE[variant](f, w, b, out, 0, f.shape[0])
    return out
