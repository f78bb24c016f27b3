"""Image containers, synthetic image generation, and binary file ingestion.

Supports binary PGM/PPM (P5/P6, maxval 255) and the CIFAR-10 binary batch
format (3073-byte records).  All readers are total over arbitrary byte
input: they either return a value or raise :class:`FormatError` carrying the
byte offset of the problem.

Synthetic pixel streams come from a splitmix64-style generator, fully pinned
so images are bit-identical across hosts: state advances by
0x9E3779B97F4A7C15 per byte and each output byte is the low byte of the
finalized state (xor-shift 30, * 0xBF58476D1CE4E5B9, xor-shift 27,
* 0x94D049BB133111EB, xor-shift 31).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FormatError",
    "ImageU8",
    "CifarRecord",
    "read_pnm",
    "write_pnm",
    "read_cifar10",
    "cifar_to_gray",
    "synth_image",
    "synth_labeled_records",
    "CIFAR_RECORD_BYTES",
]

CIFAR_RECORD_BYTES = 3073
GRAY_WEIGHTS = (77, 150, 29)  # /256; integer stand-ins for 0.299/0.587/0.114


class FormatError(ValueError):
    """Malformed input bytes; ``offset`` locates the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


@dataclass(frozen=True)
class ImageU8:
    """Row-major, channel-interleaved 8-bit image with 1 or 3 channels."""

    width: int
    height: int
    channels: int
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"bad dimensions {self.width}x{self.height}")
        if self.channels not in (1, 3):
            raise ValueError(f"channels must be 1 or 3, got {self.channels}")
        arr = np.asarray(self.data, dtype=np.uint8)
        n = self.width * self.height * self.channels
        if arr.shape != (n,):
            raise ValueError(f"data length {arr.shape} != {n}")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    def as_array(self) -> np.ndarray:
        """(height, width, channels) read-only view."""
        return self.data.reshape(self.height, self.width, self.channels)

    def plane(self, ch: int = 0) -> np.ndarray:
        """One channel as a contiguous (height, width) array."""
        return np.ascontiguousarray(self.as_array()[:, :, ch])

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "ImageU8":
        if arr.ndim == 2:
            arr = arr[:, :, None]
        h, w, c = arr.shape
        return cls(w, h, c, np.ascontiguousarray(arr, dtype=np.uint8).reshape(-1))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ImageU8):
            return NotImplemented
        return (
            (self.width, self.height, self.channels) == (other.width, other.height, other.channels)
            and self.data.tobytes() == other.data.tobytes()
        )


@dataclass(frozen=True)
class CifarRecord:
    """One CIFAR-10 record: class label and 3072 planar RGB bytes."""

    label: int
    pixels: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not 0 <= self.label <= 9:
            raise ValueError(f"label must be 0..9, got {self.label}")
        arr = np.asarray(self.pixels, dtype=np.uint8)
        if arr.shape != (3072,):
            raise ValueError(f"pixels must be 3072 bytes, got {arr.shape}")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "pixels", arr)


# ---------------------------------------------------------------------------
# PGM / PPM (binary P5 / P6, maxval 255)


def _skip_separators(data: bytes, pos: int) -> int:
    n = len(data)
    while pos < n:
        b = data[pos]
        if b in b" \t\r\n\x0b\x0c":
            pos += 1
        elif b == 0x23:  # '#' comment runs to end of line
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
        else:
            break
    return pos


def _read_int_token(data: bytes, pos: int, what: str) -> tuple[int, int]:
    pos = _skip_separators(data, pos)
    start = pos
    while pos < len(data) and 0x30 <= data[pos] <= 0x39:
        pos += 1
    if pos == start:
        raise FormatError(f"expected {what}", start)
    return int(data[start:pos]), pos


def read_pnm(data: bytes) -> ImageU8:
    """Parse binary PGM (P5, 1 channel) or PPM (P6, 3 channels)."""
    data = bytes(data)
    magic = data[:2]
    if magic == b"P5":
        channels = 1
    elif magic == b"P6":
        channels = 3
    else:
        raise FormatError(f"bad magic {magic!r}, expected P5 or P6", 0)
    width, pos = _read_int_token(data, 2, "width")
    height, pos = _read_int_token(data, pos, "height")
    mv_start = _skip_separators(data, pos)
    maxval, pos = _read_int_token(data, pos, "maxval")
    if width < 1 or height < 1:
        raise FormatError(f"bad dimensions {width}x{height}", 2)
    if maxval != 255:
        raise FormatError(f"unsupported maxval {maxval}, only 255", mv_start)
    if pos >= len(data) or data[pos] not in b" \t\r\n":
        raise FormatError("expected single whitespace before payload", pos)
    pos += 1
    expected = width * height * channels
    avail = len(data) - pos
    if avail < expected:
        raise FormatError(f"payload truncated: need {expected} bytes, have {avail}", len(data))
    if avail > expected:
        raise FormatError("trailing bytes after payload", pos + expected)
    payload = np.frombuffer(data, dtype=np.uint8, count=expected, offset=pos)
    return ImageU8(width, height, channels, payload)


def write_pnm(img: ImageU8) -> bytes:
    """Serialize to canonical binary P5/P6; lossless inverse of read_pnm."""
    magic = b"P5" if img.channels == 1 else b"P6"
    header = magic + f"\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.data.tobytes()


# ---------------------------------------------------------------------------
# CIFAR-10 binary batches


def read_cifar10(data: bytes) -> list[CifarRecord]:
    """Parse a CIFAR-10 binary batch: consecutive 3073-byte records."""
    data = bytes(data)
    if len(data) % CIFAR_RECORD_BYTES != 0:
        raise FormatError(
            f"length {len(data)} is not a multiple of {CIFAR_RECORD_BYTES}", len(data)
        )
    records = []
    for off in range(0, len(data), CIFAR_RECORD_BYTES):
        label = data[off]
        if label > 9:
            raise FormatError(f"label {label} out of range 0-9", off)
        pixels = np.frombuffer(data, dtype=np.uint8, count=3072, offset=off + 1)
        records.append(CifarRecord(label, pixels))
    return records


def cifar_to_gray(rec: CifarRecord) -> ImageU8:
    """Grayscale 32x32 image: g = (77*R + 150*G + 29*B) >> 8."""
    planes = rec.pixels.reshape(3, 32, 32).astype(np.int32)
    wr, wg, wb = GRAY_WEIGHTS
    g = (wr * planes[0] + wg * planes[1] + wb * planes[2]) >> 8
    g = np.clip(g, 0, 255).astype(np.uint8)
    return ImageU8.from_array(g)


# ---------------------------------------------------------------------------
# Synthetic images

_SM_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)
_SM_INC = np.uint64(0x9E3779B97F4A7C15)
_SM_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_SM_MUL2 = np.uint64(0x94D049BB133111EB)


def _splitmix_bytes(seed: int, n: int) -> np.ndarray:
    """First n low bytes of the splitmix64 stream seeded by `seed`."""
    idx = np.arange(1, n + 1, dtype=np.uint64)
    z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + idx * _SM_INC
    z ^= z >> np.uint64(30)
    z *= _SM_MUL1
    z ^= z >> np.uint64(27)
    z *= _SM_MUL2
    z ^= z >> np.uint64(31)
    return (z & np.uint64(0xFF)).astype(np.uint8)


def synth_image(width: int, height: int, channels: int, seed: int) -> ImageU8:
    """Deterministic pseudo-random image; same (dims, seed) -> same bytes."""
    n = width * height * channels
    return ImageU8(width, height, channels, _splitmix_bytes(seed, n))


# ---------------------------------------------------------------------------
# Procedural labeled dataset (CIFAR-record shaped)
#
# Ten visually distinct 32x32 texture families, used by the classification
# smoke tests and the default benchmark inputs when no real CIFAR-10 batch
# file is supplied.  Classes 0-5 are blob lattices at 30-degree orientation
# steps; 6 polar bullseyes; 7 checkerboards; 8 sparse large blobs; 9 smoothed
# fine-grained noise.


def _texture(label: int, rng: np.random.Generator) -> np.ndarray:
    yy, xx = np.mgrid[0:32, 0:32].astype(np.float64)
    if label <= 5:
        theta = label * math.pi / 6.0
        lam = rng.uniform(6.0, 8.5)
        ph1, ph2 = rng.uniform(0, 2 * math.pi, size=2)
        a = xx * math.cos(theta) + yy * math.sin(theta)
        b = -xx * math.sin(theta) + yy * math.cos(theta)
        v = np.sin(2 * math.pi * a / lam + ph1) * np.sin(2 * math.pi * b / (1.6 * lam) + ph2)
    elif label == 6:
        cx, cy = rng.uniform(12, 20, size=2)
        lam = rng.uniform(6.0, 8.5)
        ph = rng.uniform(0, 2 * math.pi)
        r = np.hypot(xx - cx, yy - cy)
        ang = np.arctan2(yy - cy, xx - cx)
        v = np.sin(2 * math.pi * r / lam + ph) * np.sin(4 * ang)
    elif label == 7:
        cell = rng.integers(5, 7)
        ox, oy = rng.integers(0, 8, size=2)
        v = ((((xx + ox) // cell) + ((yy + oy) // cell)) % 2) * 2.0 - 1.0
    elif label == 8:
        v = np.zeros((32, 32))
        for _ in range(int(rng.integers(3, 7))):
            cx, cy = rng.uniform(4, 28, size=2)
            s = rng.uniform(2.4, 3.2)
            v += rng.choice([-1.0, 1.0]) * np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2 * s * s))
        m = np.abs(v).max()
        if m > 0:
            v /= m
    else:
        noise = rng.standard_normal((32, 32))
        # light box smoothing keeps per-pixel texture but adds local blobs
        k = np.ones(3) / 3.0
        noise = np.apply_along_axis(lambda r: np.convolve(r, k, mode="same"), 0, noise)
        noise = np.apply_along_axis(lambda r: np.convolve(r, k, mode="same"), 1, noise)
        v = noise / max(np.abs(noise).max(), 1e-9)
    return v


def synth_labeled_records(n: int, seed: int, classes: int = 10) -> list[CifarRecord]:
    """n deterministic CIFAR-shaped records with balanced procedural classes."""
    records = []
    for i in range(n):
        label = i % classes
        rng = np.random.default_rng(np.array([seed, i], dtype=np.uint64))
        v = _texture(label, rng)
        v = 0.5 + 0.45 * v + rng.normal(0.0, 0.02, size=(32, 32))
        base = np.clip(v, 0.0, 1.0)
        gains = rng.uniform(0.75, 1.0, size=3)
        planes = [(np.clip(base * g, 0.0, 1.0) * 255.0).astype(np.uint8) for g in gains]
        records.append(CifarRecord(label, np.concatenate([p.reshape(-1) for p in planes])))
    return records
