"""Binary persistence of the dictionary + SVM model.

Little-endian layout:

    magic   4 bytes  b"BOWM"
    version u32      (currently 1)
    K       u32      word count
    classes u32
    centroids        K * 128 f32
    per class        K f32 weights, then 1 f32 bias

The loader validates magic, version, and total length.
"""

from __future__ import annotations

import struct

import numpy as np

from ..image import FormatError
from .cluster import Dictionary
from .sift import DESC_LEN
from .svm import LinearSvmModel

__all__ = ["save_model", "load_model", "MAGIC", "VERSION"]

MAGIC = b"BOWM"
VERSION = 1


def save_model(dictionary: Dictionary, model: LinearSvmModel) -> bytes:
    if dictionary.dim != DESC_LEN:
        raise ValueError(f"dictionary dim must be {DESC_LEN}, got {dictionary.dim}")
    if model.dim != dictionary.k:
        raise ValueError(f"model dim {model.dim} != dictionary k {dictionary.k}")
    k = dictionary.k
    classes = model.n_classes
    parts = [MAGIC, struct.pack("<III", VERSION, k, classes)]
    parts.append(dictionary.centroids.astype("<f4").tobytes())
    for c in range(classes):
        parts.append(model.weights[c].astype("<f4").tobytes())
        parts.append(struct.pack("<f", float(model.biases[c])))
    return b"".join(parts)


def load_model(data: bytes) -> tuple[Dictionary, LinearSvmModel]:
    data = bytes(data)
    if data[:4] != MAGIC:
        raise FormatError(f"bad magic {data[:4]!r}, expected {MAGIC!r}", 0)
    if len(data) < 16:
        raise FormatError("header truncated", len(data))
    version, k, classes = struct.unpack_from("<III", data, 4)
    if version != VERSION:
        raise FormatError(f"unsupported version {version}", 4)
    if k < 1 or classes < 1:
        raise FormatError(f"bad counts k={k} classes={classes}", 8)
    expected = 16 + 4 * (k * DESC_LEN) + classes * (4 * k + 4)
    if len(data) != expected:
        raise FormatError(f"length {len(data)} != expected {expected}", min(len(data), expected))
    off = 16
    cents = np.frombuffer(data, dtype="<f4", count=k * DESC_LEN, offset=off).reshape(k, DESC_LEN)
    off += 4 * k * DESC_LEN
    weights = np.empty((classes, k), dtype=np.float32)
    biases = np.empty(classes, dtype=np.float32)
    for c in range(classes):
        weights[c] = np.frombuffer(data, dtype="<f4", count=k, offset=off)
        off += 4 * k
        (biases[c],) = struct.unpack_from("<f", data, off)
        off += 4
    return Dictionary(cents), LinearSvmModel(weights, biases)
