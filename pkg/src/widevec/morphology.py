"""Grayscale erosion with a centered rectangular structuring element.

Each output pixel is the minimum intensity over the (2r+1) x (2r+1) window;
samples outside the image count as 255, the identity of min.  That rule
makes erosion anti-extensive, monotone, and exactly composable
(erode r=1 twice == erode r=2, everywhere).

Implemented as two separable passes (column-min then row-min) over an
intermediate plane; result equals the direct 2D window minimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import parallel
from ._jit import njit
from .image import ImageU8
from .variants import LoopVariant

__all__ = ["StructuringElement", "erode"]

_NEUTRAL = 255  # min-identity used for out-of-bounds samples


@dataclass(frozen=True)
class StructuringElement:
    """Centered rectangle of side 2*radius + 1."""

    radius: int

    def __post_init__(self):
        if self.radius < 1:
            raise ValueError(f"radius must be >= 1, got {self.radius}")

    @property
    def side(self) -> int:
        return 2 * self.radius + 1


# `src` is padded by r rows (vertical pass) or r columns (horizontal pass)
# with the 255 neutral; kernels fill rows [y0, y1) of `out`.


@njit
def _colmin_rows_scalar(src, out, r, y0, y1):
    w = out.shape[1]
    span = 2 * r + 1
    for y in range(y0, y1):
        for x in range(w):
            m = src[y, x]
            for i in range(1, span):
                v = src[y + i, x]
                if v < m:
                    m = v
            out[y, x] = m


@njit
def _colmin_rows_blocked(src, out, r, bw, y0, y1):
    w = out.shape[1]
    span = 2 * r + 1
    for y in range(y0, y1):
        x0 = 0
        while x0 + bw <= w:
            for j in range(bw):
                out[y, x0 + j] = src[y, x0 + j]
            for i in range(1, span):
                for j in range(bw):
                    v = src[y + i, x0 + j]
                    if v < out[y, x0 + j]:
                        out[y, x0 + j] = v
            x0 += bw
        for x in range(x0, w):
            m = src[y, x]
            for i in range(1, span):
                v = src[y + i, x]
                if v < m:
                    m = v
            out[y, x] = m


@njit
def _rowmin_rows_scalar(src, out, r, y0, y1):
    w = out.shape[1]
    span = 2 * r + 1
    for y in range(y0, y1):
        for x in range(w):
            m = src[y, x]
            for j in range(1, span):
                v = src[y, x + j]
                if v < m:
                    m = v
            out[y, x] = m


@njit
def _rowmin_rows_blocked(src, out, r, bw, y0, y1):
    w = out.shape[1]
    span = 2 * r + 1
    for y in range(y0, y1):
        x0 = 0
        while x0 + bw <= w:
            for j in range(bw):
                out[y, x0 + j] = src[y, x0 + j]
            for t in range(1, span):
                for j in range(bw):
                    v = src[y, x0 + t + j]
                    if v < out[y, x0 + j]:
                        out[y, x0 + j] = v
            x0 += bw
        for x in range(x0, w):
            m = src[y, x]
            for j in range(1, span):
                v = src[y, x + j]
                if v < m:
                    m = v
            out[y, x] = m


def _run_rows(fn, args, height: int, run_parallel: bool):
    if run_parallel and parallel.get_worker_count() > 1:
        grain = max(1, math.ceil(height / parallel.get_worker_count()))
        parallel.parallel_for(
            parallel.RangeJob(0, height, grain), lambda lo, hi: fn(*args, lo, hi)
        )
    else:
        fn(*args, 0, height)


def erode(
    img: ImageU8,
    se: StructuringElement | int,
    variant: LoopVariant | str = LoopVariant.SCALAR,
    run_parallel: bool = False,
) -> ImageU8:
    """Minimum filter over the structuring element's window (1-channel only)."""
    if img.channels != 1:
        raise ValueError(f"erode requires a single-channel image, got {img.channels}")
    if isinstance(se, int):
        se = StructuringElement(se)
    variant = LoopVariant.parse(variant)
    r = se.radius
    h, w = img.height, img.width
    plane = img.plane(0)

    padded_v = np.pad(plane, ((r, r), (0, 0)), constant_values=_NEUTRAL)
    tmp = np.empty((h, w), dtype=np.uint8)
    if variant is LoopVariant.SCALAR:
        _run_rows(_colmin_rows_scalar, (padded_v, tmp, r), h, run_parallel)
    else:
        _run_rows(_colmin_rows_blocked, (padded_v, tmp, r, variant.block_bytes), h, run_parallel)

    padded_h = np.pad(tmp, ((0, 0), (r, r)), constant_values=_NEUTRAL)
    out = np.empty((h, w), dtype=np.uint8)
    if variant is LoopVariant.SCALAR:
        _run_rows(_rowmin_rows_scalar, (padded_h, out, r), h, run_parallel)
    else:
        _run_rows(_rowmin_rows_blocked, (padded_h, out, r, variant.block_bytes), h, run_parallel)
    return ImageU8.from_array(out)
