"""Portable fixed-width vector words with interchangeable execution backends.

A ``VecWord`` is an immutable group of lanes of one element kind, sized by a
width class: NARROW is one 128-bit register, WIDE is a group of four
consecutive narrow registers (512 bits).  Three backends execute the
operations:

* ``SCALAR_REF`` - per-lane pure-Python reference; always available and the
  oracle every other backend is tested against.
* ``NATIVE_NARROW`` - narrow words executed as single numpy array ops (the
  host's SIMD engine).
* ``SYNTH_WIDE`` - wide words executed as four narrow operations issued
  back-to-back, i.e. software register grouping.

Semantics are fixed independently of backend:

* integer add/sub/mul wrap modulo 2**width (two's complement for signed);
* ``fma`` is UNFUSED in this build: d = f32(f32(a*b) + c), two roundings;
* f32 ``reduce_sum`` accumulates in ascending lane order;
* integer ``reduce_sum`` uses a widened accumulator (U8/U16 -> u32,
  I16/I32 -> i64) and is exact for any supported lane count.

Set ``WIDEVEC_FORCE_SCALAR=1`` to disable the numpy-backed backends; all
operations then run on the reference path (and benchmarks flag the records
as emulated).
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ._jit import jit_active

__all__ = [
    "ElementKind",
    "WidthClass",
    "VecWord",
    "Backend",
    "WIDE_PARTS",
    "lane_count",
    "available_backends",
    "capability_report",
    "scalar_only",
    "splat",
    "load",
    "store",
    "add",
    "sub",
    "mul",
    "minimum",
    "maximum",
    "fma",
    "widen_lo",
    "widen_hi",
    "wide_from_parts",
    "parts_of_wide",
    "reduce_sum",
    "reduce_min",
]


class ElementKind(Enum):
    """Lane element type of a vector word."""

    U8 = "u8"
    U16 = "u16"
    I16 = "i16"
    I32 = "i32"
    F32 = "f32"

    @property
    def dtype(self) -> np.dtype:
        return _DTYPES[self]

    @property
    def bits(self) -> int:
        return self.dtype.itemsize * 8

    @property
    def is_float(self) -> bool:
        return self is ElementKind.F32

    @property
    def is_signed(self) -> bool:
        return self.dtype.kind == "i"

    @property
    def widened(self) -> "ElementKind":
        """Kind holding this kind's values at doubled element width."""
        try:
            return _WIDEN[self]
        except KeyError:
            raise ValueError(f"{self.name} has no widened counterpart") from None


_DTYPES = {
    ElementKind.U8: np.dtype(np.uint8),
    ElementKind.U16: np.dtype(np.uint16),
    ElementKind.I16: np.dtype(np.int16),
    ElementKind.I32: np.dtype(np.int32),
    ElementKind.F32: np.dtype(np.float32),
}

_WIDEN = {ElementKind.U8: ElementKind.U16, ElementKind.I16: ElementKind.I32}

# Integer reduce_sum accumulator dtypes; wide enough that <=64 lanes of the
# source kind can never overflow.
_SUM_ACC = {
    ElementKind.U8: np.uint32,
    ElementKind.U16: np.uint32,
    ElementKind.I16: np.int64,
    ElementKind.I32: np.int64,
}


class WidthClass(Enum):
    """Register width class: one narrow register or a group of four."""

    NARROW = 128
    WIDE = 512

    @property
    def bits(self) -> int:
        return self.value


WIDE_PARTS = WidthClass.WIDE.bits // WidthClass.NARROW.bits  # = 4


def lane_count(kind: ElementKind, wclass: WidthClass) -> int:
    return wclass.bits // kind.bits


class Backend(Enum):
    SCALAR_REF = "scalar_ref"
    NATIVE_NARROW = "native_narrow"
    SYNTH_WIDE = "synth_wide"


_FORCE_SCALAR = os.environ.get("WIDEVEC_FORCE_SCALAR", "") not in ("", "0")


def available_backends() -> tuple[Backend, ...]:
    """Backends the current process will dispatch to."""
    if _FORCE_SCALAR:
        return (Backend.SCALAR_REF,)
    return (Backend.SCALAR_REF, Backend.NATIVE_NARROW, Backend.SYNTH_WIDE)


def capability_report() -> list[str]:
    """Machine-readable key=value lines describing execution capabilities."""
    avail = available_backends()
    return [
        f"backend.scalar_ref={int(Backend.SCALAR_REF in avail)}",
        f"backend.native_narrow={int(Backend.NATIVE_NARROW in avail)}",
        f"backend.synth_wide={int(Backend.SYNTH_WIDE in avail)}",
        f"jit={int(jit_active())}",
    ]


@contextmanager
def scalar_only():
    """Force all operations onto the SCALAR_REF path within the block."""
    global _FORCE_SCALAR
    prev = _FORCE_SCALAR
    _FORCE_SCALAR = True
    try:
        yield
    finally:
        _FORCE_SCALAR = prev


@dataclass(frozen=True)
class VecWord:
    """Immutable vector value: ``lane_count(kind, wclass)`` lanes of ``kind``."""

    kind: ElementKind
    wclass: WidthClass
    lanes: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = lane_count(self.kind, self.wclass)
        arr = np.asarray(self.lanes, dtype=self.kind.dtype)
        if arr.shape != (n,):
            raise ValueError(f"expected {n} lanes of {self.kind.name}, got shape {arr.shape}")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "lanes", arr)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VecWord):
            return NotImplemented
        return (
            self.kind is other.kind
            and self.wclass is other.wclass
            and self.lanes.tobytes() == other.lanes.tobytes()
        )

    def __hash__(self):
        return hash((self.kind, self.wclass, self.lanes.tobytes()))

    def __repr__(self):
        return f"VecWord({self.kind.name}/{self.wclass.name}, {self.lanes.tolist()})"

    def tolist(self) -> list:
        return self.lanes.tolist()


def _check_same_shape(*words: VecWord):
    k, c = words[0].kind, words[0].wclass
    for w in words[1:]:
        if w.kind is not k or w.wclass is not c:
            raise ValueError(
                f"kind/class mismatch: {k.name}/{c.name} vs {w.kind.name}/{w.wclass.name}"
            )


def _use_numpy() -> bool:
    return not _FORCE_SCALAR


# ---------------------------------------------------------------------------
# Reference (per-lane, pure Python) implementations.


def _wrap_int(v: int, kind: ElementKind) -> int:
    mask = (1 << kind.bits) - 1
    v &= mask
    if kind.is_signed and v >= (1 << (kind.bits - 1)):
        v -= 1 << kind.bits
    return v


def _ref_lanewise(op: str, kind: ElementKind, lane_args: list[tuple]):
    if kind.is_float:
        out = np.empty(len(lane_args), dtype=np.float32)
        for i, args in enumerate(lane_args):
            a = np.float32(args[0])
            b = np.float32(args[1])
            if op == "add":
                r = a + b
            elif op == "sub":
                r = a - b
            elif op == "mul":
                r = a * b
            elif op == "min":
                r = a if a <= b else b
            elif op == "max":
                r = a if a >= b else b
            elif op == "fma":
                # unfused: round the product, then round the sum
                r = np.float32(a * b) + np.float32(args[2])
            else:  # pragma: no cover
                raise AssertionError(op)
            out[i] = r
        return out
    out = np.empty(len(lane_args), dtype=kind.dtype)
    for i, args in enumerate(lane_args):
        a = int(args[0])
        b = int(args[1])
        if op == "add":
            r = _wrap_int(a + b, kind)
        elif op == "sub":
            r = _wrap_int(a - b, kind)
        elif op == "mul":
            r = _wrap_int(a * b, kind)
        elif op == "min":
            r = a if a <= b else b
        elif op == "max":
            r = a if a >= b else b
        else:  # pragma: no cover
            raise AssertionError(op)
        out[i] = r
    return out


def _np_lanewise(op: str, arrays: tuple[np.ndarray, ...]) -> np.ndarray:
    a = arrays[0]
    b = arrays[1]
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "min":
        return np.minimum(a, b)
    if op == "max":
        return np.maximum(a, b)
    if op == "fma":
        return a * b + arrays[2]
    raise AssertionError(op)  # pragma: no cover


def _lanewise(op: str, *words: VecWord) -> VecWord:
    _check_same_shape(*words)
    kind, wclass = words[0].kind, words[0].wclass
    arrays = tuple(w.lanes for w in words)
    if not _use_numpy():
        lane_args = list(zip(*(arr.tolist() if not kind.is_float else list(arr) for arr in arrays)))
        out = _ref_lanewise(op, kind, lane_args)
    elif wclass is WidthClass.WIDE:
        # register grouping: four narrow operations back-to-back
        n = lane_count(kind, WidthClass.NARROW)
        out = np.empty(lane_count(kind, wclass), dtype=kind.dtype)
        for p in range(WIDE_PARTS):
            sl = slice(p * n, (p + 1) * n)
            out[sl] = _np_lanewise(op, tuple(arr[sl] for arr in arrays))
    else:
        out = _np_lanewise(op, arrays)
    return VecWord(kind, wclass, out)


# ---------------------------------------------------------------------------
# Construction, loads and stores.


def _validate_scalar(x, kind: ElementKind):
    if kind.is_float:
        return np.float32(x)
    xi = int(x)
    info = np.iinfo(kind.dtype)
    if not (info.min <= xi <= info.max):
        raise ValueError(f"{x!r} not representable as {kind.name}")
    return xi


def splat(x, kind: ElementKind, wclass: WidthClass) -> VecWord:
    """Word with every lane equal to ``x``."""
    v = _validate_scalar(x, kind)
    n = lane_count(kind, wclass)
    return VecWord(kind, wclass, np.full(n, v, dtype=kind.dtype))


def _check_span(buf: np.ndarray, offset: int, n: int, kind: ElementKind):
    if not isinstance(buf, np.ndarray) or buf.ndim != 1:
        raise ValueError("buffer must be a 1-D numpy array")
    if buf.dtype != kind.dtype:
        raise ValueError(f"buffer dtype {buf.dtype} does not match {kind.name}")
    if offset < 0 or offset + n > buf.shape[0]:
        raise IndexError(f"span [{offset}, {offset + n}) out of bounds for length {buf.shape[0]}")


def load(buf: np.ndarray, offset: int, kind: ElementKind, wclass: WidthClass) -> VecWord:
    """Copy ``lane_count`` consecutive elements starting at ``offset``."""
    n = lane_count(kind, wclass)
    _check_span(buf, offset, n, kind)
    if wclass is WidthClass.WIDE and _use_numpy():
        # four independent narrow loads, concatenated in ascending order
        nn = lane_count(kind, WidthClass.NARROW)
        parts = [load(buf, offset + p * nn, kind, WidthClass.NARROW) for p in range(WIDE_PARTS)]
        return wide_from_parts(*parts)
    return VecWord(kind, wclass, buf[offset : offset + n])


def store(v: VecWord, buf: np.ndarray, offset: int) -> None:
    """Write the word's lanes into ``buf[offset : offset + lanes)``."""
    n = lane_count(v.kind, v.wclass)
    _check_span(buf, offset, n, v.kind)
    buf[offset : offset + n] = v.lanes


# ---------------------------------------------------------------------------
# Lane-wise arithmetic.


def add(a: VecWord, b: VecWord) -> VecWord:
    return _lanewise("add", a, b)


def sub(a: VecWord, b: VecWord) -> VecWord:
    return _lanewise("sub", a, b)


def mul(a: VecWord, b: VecWord) -> VecWord:
    return _lanewise("mul", a, b)


def minimum(a: VecWord, b: VecWord) -> VecWord:
    return _lanewise("min", a, b)


def maximum(a: VecWord, b: VecWord) -> VecWord:
    return _lanewise("max", a, b)


def fma(a: VecWord, b: VecWord, c: VecWord) -> VecWord:
    """Lane-wise d = c + a*b (f32 only; unfused in this build)."""
    if a.kind is not ElementKind.F32:
        raise ValueError("fma requires F32 words")
    return _lanewise("fma", a, b, c)


# ---------------------------------------------------------------------------
# Width conversions.


def _check_widenable(a: VecWord):
    if a.kind not in _WIDEN:
        raise ValueError(f"widen requires U8 or I16, got {a.kind.name}")


def widen_lo(a: VecWord) -> VecWord:
    """Lower half of the lanes, zero/sign-extended to doubled element width."""
    _check_widenable(a)
    wide_kind = a.kind.widened
    half = a.lanes.shape[0] // 2
    if not _use_numpy():
        out = np.array([int(v) for v in a.lanes[:half].tolist()], dtype=wide_kind.dtype)
    elif a.wclass is WidthClass.WIDE:
        # m8 -> m1 -> m4 style regrouping: widen each narrow part, regroup
        p0, p1, _, _ = parts_of_wide(a)
        return wide_from_parts(widen_lo(p0), widen_hi(p0), widen_lo(p1), widen_hi(p1))
    else:
        out = a.lanes[:half].astype(wide_kind.dtype)
    return VecWord(wide_kind, a.wclass, out)


def widen_hi(a: VecWord) -> VecWord:
    """Upper half of the lanes, zero/sign-extended to doubled element width."""
    _check_widenable(a)
    wide_kind = a.kind.widened
    half = a.lanes.shape[0] // 2
    if not _use_numpy():
        out = np.array([int(v) for v in a.lanes[half:].tolist()], dtype=wide_kind.dtype)
    elif a.wclass is WidthClass.WIDE:
        _, _, p2, p3 = parts_of_wide(a)
        return wide_from_parts(widen_lo(p2), widen_hi(p2), widen_lo(p3), widen_hi(p3))
    else:
        out = a.lanes[half:].astype(wide_kind.dtype)
    return VecWord(wide_kind, a.wclass, out)


def wide_from_parts(p0: VecWord, p1: VecWord, p2: VecWord, p3: VecWord) -> VecWord:
    """Group four narrow words into one wide word, lanes ascending across parts."""
    parts = (p0, p1, p2, p3)
    for p in parts:
        if p.wclass is not WidthClass.NARROW:
            raise ValueError("wide_from_parts takes NARROW words")
    _check_same_shape(*parts)
    return VecWord(p0.kind, WidthClass.WIDE, np.concatenate([p.lanes for p in parts]))


def parts_of_wide(w: VecWord) -> tuple[VecWord, VecWord, VecWord, VecWord]:
    """Split a wide word into its four narrow parts, ascending lane order."""
    if w.wclass is not WidthClass.WIDE:
        raise ValueError("parts_of_wide takes a WIDE word")
    n = lane_count(w.kind, WidthClass.NARROW)
    return tuple(
        VecWord(w.kind, WidthClass.NARROW, w.lanes[p * n : (p + 1) * n]) for p in range(WIDE_PARTS)
    )


# ---------------------------------------------------------------------------
# Reductions.


def reduce_sum(a: VecWord):
    """Sum of all lanes.

    Integers: exact, via a widened accumulator; returns int.
    F32: accumulated in ascending lane order with f32 rounding; returns float.
    """
    if a.kind.is_float:
        acc = np.float32(0.0)
        for v in a.lanes:
            acc = np.float32(acc + v)
        return float(acc)
    if not _use_numpy():
        return sum(int(v) for v in a.lanes.tolist())
    acc_dtype = _SUM_ACC[a.kind]
    if a.wclass is WidthClass.WIDE:
        total = 0
        for p in parts_of_wide(a):
            total += int(p.lanes.sum(dtype=acc_dtype))
        return total
    return int(a.lanes.sum(dtype=acc_dtype))


def reduce_min(a: VecWord):
    """Minimum over all lanes; returns int (integer kinds) or float (F32)."""
    if not _use_numpy():
        vals = a.lanes.tolist()
        m = vals[0]
        for v in vals[1:]:
            if v < m:
                m = v
        return float(m) if a.kind.is_float else int(m)
    if a.wclass is WidthClass.WIDE:
        parts = parts_of_wide(a)
        m = parts[0].lanes.min()
        for p in parts[1:]:
            m = min(m, p.lanes.min())
    else:
        m = a.lanes.min()
    return float(m) if a.kind.is_float else int(m)
