"""widevec: portable vector-width abstraction, vectorized image kernels, and
a benchmark harness with narrow (128-bit) and wide (512-bit register-group)
execution variants."""

from .image import CifarRecord, FormatError, ImageU8
from .variants import LoopVariant
from .vec import Backend, ElementKind, VecWord, WidthClass

__version__ = "0.1.0"

__all__ = [
    "Backend",
    "CifarRecord",
    "ElementKind",
    "FormatError",
    "ImageU8",
    "LoopVariant",
    "VecWord",
    "WidthClass",
    "__version__",
]
