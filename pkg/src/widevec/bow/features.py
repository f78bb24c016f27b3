"""Bag-of-words histograms: nearest-word counting, L1-normalized."""

from __future__ import annotations

import numpy as np

from ..variants import LoopVariant
from .cluster import Dictionary
from .kernels import assign_nearest

__all__ = ["quantize_histogram"]


def quantize_histogram(
    descriptors: np.ndarray,
    dictionary: Dictionary,
    variant: LoopVariant | str = LoopVariant.NARROW,
) -> np.ndarray:
    """(k,) f32 histogram of nearest-centroid assignments; zeros when empty.

    Assignment uses squared L2 with ties to the lowest word index; counts are
    L1-normalized so the histogram sums to 1 for any non-empty descriptor set.
    """
    k = dictionary.k
    descriptors = np.asarray(descriptors, dtype=np.float32)
    if descriptors.ndim == 1:
        descriptors = descriptors[None, :]
    if descriptors.shape[0] == 0:
        return np.zeros(k, dtype=np.float32)
    if descriptors.shape[1] != dictionary.dim:
        raise ValueError(
            f"descriptor dim {descriptors.shape[1]} != dictionary dim {dictionary.dim}"
        )
    labels, _ = assign_nearest(descriptors, dictionary.centroids, variant)
    counts = np.bincount(labels, minlength=k).astype(np.float64)
    return (counts / counts.sum()).astype(np.float32)
