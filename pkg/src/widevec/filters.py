"""2D correlation filtering of 8-bit images with f32 kernels.

The accumulation contract makes every variant byte-identical: per output
pixel, kernel taps are summed sequentially in row-major tap order in f32,
then rounded half-to-even and saturated to u8.  Lanes run parallel across x,
so blocking the x loop (16- or 64-pixel registers) cannot change results.
Multiply and add are separately rounded (no FMA contraction).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import parallel
from ._jit import njit
from .image import ImageU8
from .variants import LoopVariant

__all__ = [
    "KernelF32",
    "BorderPolicy",
    "gaussian_kernel",
    "filter2d",
    "filter2d_float",
]


class BorderPolicy(Enum):
    """Out-of-image sampling rule."""

    REFLECT101 = "reflect101"  # mirror about the edge pixel, not repeating it
    REPLICATE = "replicate"

    @property
    def pad_mode(self) -> str:
        return "reflect" if self is BorderPolicy.REFLECT101 else "edge"

    @classmethod
    def parse(cls, v: "BorderPolicy | str") -> "BorderPolicy":
        if isinstance(v, cls):
            return v
        try:
            return cls(str(v).lower())
        except ValueError:
            raise ValueError(f"unknown border policy {v!r}") from None


@dataclass(frozen=True)
class KernelF32:
    """Odd-sized square f32 filter kernel anchored at its center."""

    k: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.k < 1 or self.k % 2 == 0:
            raise ValueError(f"kernel size must be odd and >= 1, got {self.k}")
        arr = np.asarray(self.coeffs, dtype=np.float32)
        if arr.shape != (self.k, self.k):
            raise ValueError(f"coeffs shape {arr.shape} != ({self.k}, {self.k})")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "coeffs", arr)

    @property
    def anchor(self) -> tuple[int, int]:
        return (self.k // 2, self.k // 2)

    def scaled(self, a: float) -> "KernelF32":
        return KernelF32(self.k, self.coeffs * np.float32(a))


def auto_sigma(k: int) -> float:
    """Default Gaussian sigma for kernel size k (reference-library formula)."""
    return 0.3 * ((k - 1) * 0.5 - 1.0) + 0.8


def gaussian_kernel(k: int, sigma: float | None = None) -> KernelF32:
    """Normalized k x k Gaussian; sigma=None picks the size-derived default."""
    if k < 1 or k % 2 == 0:
        raise ValueError(f"kernel size must be odd and >= 1, got {k}")
    if sigma is None or sigma <= 0:
        sigma = auto_sigma(k)
    c = k // 2
    ax = np.arange(k, dtype=np.float64) - c
    d2 = ax[:, None] ** 2 + ax[None, :] ** 2
    g = np.exp(-d2 / (2.0 * sigma * sigma))
    g /= g.sum()
    return KernelF32(k, g.astype(np.float32))


# ---------------------------------------------------------------------------
# Hot loops.  `src` is the border-padded f32 plane, `out` the u8 result;
# kernels fill rows [y0, y1).


@njit
def _conv_rows_scalar(src, coeffs, out, y0, y1):
    k = coeffs.shape[0]
    w = out.shape[1]
    for y in range(y0, y1):
        for x in range(w):
            acc = np.float32(0.0)
            for i in range(k):
                for j in range(k):
                    acc += coeffs[i, j] * src[y + i, x + j]
            v = np.rint(acc)
            if v < 0.0:
                v = 0.0
            elif v > 255.0:
                v = 255.0
            out[y, x] = np.uint8(v)


@njit
def _conv_rows_blocked(src, coeffs, out, bw, y0, y1):
    k = coeffs.shape[0]
    w = out.shape[1]
    acc = np.empty(bw, dtype=np.float32)
    for y in range(y0, y1):
        x0 = 0
        while x0 + bw <= w:
            for j in range(bw):
                acc[j] = np.float32(0.0)
            for i in range(k):
                for t in range(k):
                    c = coeffs[i, t]
                    for j in range(bw):
                        acc[j] += c * src[y + i, x0 + t + j]
            for j in range(bw):
                v = np.rint(acc[j])
                if v < 0.0:
                    v = 0.0
                elif v > 255.0:
                    v = 255.0
                out[y, x0 + j] = np.uint8(v)
            x0 += bw
        # tail falls back to the scalar loop
        for x in range(x0, w):
            a = np.float32(0.0)
            for i in range(k):
                for t in range(k):
                    a += coeffs[i, t] * src[y + i, x + t]
            v = np.rint(a)
            if v < 0.0:
                v = 0.0
            elif v > 255.0:
                v = 255.0
            out[y, x] = np.uint8(v)


@njit
def _conv_rows_float(src, coeffs, out, y0, y1):
    k = coeffs.shape[0]
    w = out.shape[1]
    for y in range(y0, y1):
        for x in range(w):
            acc = np.float32(0.0)
            for i in range(k):
                for j in range(k):
                    acc += coeffs[i, j] * src[y + i, x + j]
            out[y, x] = acc


def _check_fit(img: ImageU8, kernel: KernelF32, border: BorderPolicy):
    pad = kernel.k // 2
    if border is BorderPolicy.REFLECT101 and pad > min(img.width, img.height) - 1:
        raise ValueError(
            f"kernel {kernel.k} does not fit {img.width}x{img.height} under REFLECT101"
        )


def _padded_plane(img: ImageU8, ch: int, pad: int, border: BorderPolicy) -> np.ndarray:
    plane = img.plane(ch)
    if pad == 0:
        return plane.astype(np.float32)
    return np.pad(plane, pad, mode=border.pad_mode).astype(np.float32)


def _run_rows(fn, args, height: int, run_parallel: bool):
    if run_parallel and parallel.get_worker_count() > 1:
        grain = max(1, math.ceil(height / parallel.get_worker_count()))
        parallel.parallel_for(
            parallel.RangeJob(0, height, grain), lambda lo, hi: fn(*args, lo, hi)
        )
    else:
        fn(*args, 0, height)


def filter2d(
    img: ImageU8,
    kernel: KernelF32,
    border: BorderPolicy | str = BorderPolicy.REFLECT101,
    variant: LoopVariant | str = LoopVariant.SCALAR,
    run_parallel: bool = False,
) -> ImageU8:
    """Correlate the image with the kernel; output has the input's dimensions.

    The kernel is applied as-is (no flip); for symmetric kernels this equals
    convolution.  Channels are filtered independently.  Every variant yields
    byte-identical output.
    """
    border = BorderPolicy.parse(border)
    variant = LoopVariant.parse(variant)
    _check_fit(img, kernel, border)
    pad = kernel.k // 2
    out_planes = []
    for ch in range(img.channels):
        src = _padded_plane(img, ch, pad, border)
        out = np.empty((img.height, img.width), dtype=np.uint8)
        if variant is LoopVariant.SCALAR:
            _run_rows(_conv_rows_scalar, (src, kernel.coeffs, out), img.height, run_parallel)
        else:
            bw = variant.block_bytes
            _run_rows(_conv_rows_blocked, (src, kernel.coeffs, out, bw), img.height, run_parallel)
        out_planes.append(out)
    return ImageU8.from_array(np.stack(out_planes, axis=-1))


def filter2d_float(
    img: ImageU8,
    kernel: KernelF32,
    border: BorderPolicy | str = BorderPolicy.REFLECT101,
) -> np.ndarray:
    """Debug entry point: the pre-quantization f32 accumulation planes.

    Returns (height, width, channels) float32, before rounding and clamping.
    """
    border = BorderPolicy.parse(border)
    _check_fit(img, kernel, border)
    pad = kernel.k // 2
    planes = []
    for ch in range(img.channels):
        src = _padded_plane(img, ch, pad, border)
        out = np.empty((img.height, img.width), dtype=np.float32)
        _conv_rows_float(src, kernel.coeffs, out, 0, img.height)
        planes.append(out)
    return np.stack(planes, axis=-1)
