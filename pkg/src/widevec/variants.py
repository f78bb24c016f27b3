"""Loop-structure variants shared by the algorithm hot paths.

SCALAR processes one element per iteration; NARROW processes one 128-bit
register of pixels per iteration (16 bytes); WIDE processes a group of four
such registers (64 bytes) back-to-back.  All variants of an operation are
required to produce byte-identical results; only the loop shape differs.
"""

from __future__ import annotations

from enum import Enum

__all__ = ["LoopVariant", "NARROW_BYTES", "WIDE_BYTES"]

NARROW_BYTES = 16
WIDE_BYTES = 64


class LoopVariant(Enum):
    SCALAR = "scalar"
    NARROW = "narrow"
    WIDE = "wide"

    @classmethod
    def parse(cls, v: "LoopVariant | str") -> "LoopVariant":
        if isinstance(v, cls):
            return v
        try:
            return cls(str(v).lower())
        except ValueError:
            raise ValueError(
                f"unknown variant {v!r}; expected one of {[m.value for m in cls]}"
            ) from None

    @property
    def block_bytes(self) -> int:
        """Pixels-per-iteration for byte-sized lanes (0 = element at a time)."""
        if self is LoopVariant.NARROW:
            return NARROW_BYTES
        if self is LoopVariant.WIDE:
            return WIDE_BYTES
        return 0
