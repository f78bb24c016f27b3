"""One-vs-rest linear SVMs trained by deterministic subgradient descent.

Each class gets a binary hinge-loss problem, minimized by epoch-wise
subgradient steps with the 1/(lambda*t) schedule, lambda = 1/(C*M).  The
bias is trained as a constant-1 feature appended to the inputs, so the
whole parameter vector is L2-regularized and the multiplicative shrinkage
of the schedule applies to it uniformly (an unregularized bias under this
schedule takes enormous early steps it never recovers from).  The sample
order is shuffled once from the seed and reused every epoch, so a fixed
seed yields a bit-identical model.  The returned parameters are the
averaged iterate (the running mean over all steps); at each epoch boundary
the objective of that average is recorded, and unlike the raw iterates the
trace decreases monotonically in practice.

Prediction scores w_c . x + b_c through the shared dot-product kernels and
takes the argmax, ties to the lowest class id.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..variants import LoopVariant
from .kernels import score_batch

__all__ = ["LinearSvmModel", "svm_train", "svm_predict", "svm_predict_batch"]


@dataclass(frozen=True)
class LinearSvmModel:
    weights: np.ndarray = field(repr=False)  # (classes, dim) f32
    biases: np.ndarray = field(repr=False)  # (classes,) f32
    c_param: float = 1.0
    objective_trace: np.ndarray | None = field(default=None, repr=False)  # (classes, epochs)

    def __post_init__(self):
        w = np.ascontiguousarray(self.weights, dtype=np.float32)
        b = np.ascontiguousarray(self.biases, dtype=np.float32)
        if w.ndim != 2 or b.shape != (w.shape[0],):
            raise ValueError(f"inconsistent model shapes {w.shape} / {b.shape}")
        if not (np.isfinite(w).all() and np.isfinite(b).all()):
            raise ValueError("model parameters must be finite")
        w.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "biases", b)

    @property
    def n_classes(self) -> int:
        return self.weights.shape[0]

    @property
    def dim(self) -> int:
        return self.weights.shape[1]


def _objective(wb, xb, y, lam):
    margins = y * (xb @ wb)
    hinge = np.maximum(0.0, 1.0 - margins)
    return 0.5 * lam * float(wb @ wb) + float(hinge.mean())


def svm_train(
    features: np.ndarray,
    labels: np.ndarray,
    c: float = 1.0,
    epochs: int = 100,
    seed: int = 0,
    n_classes: int = 10,
) -> LinearSvmModel:
    """Train one-vs-rest linear SVMs on (M, dim) features with labels 0..n-1."""
    x = np.ascontiguousarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    m = x.shape[0]
    if m < 1:
        raise ValueError("empty training set")
    if labels.shape != (m,):
        raise ValueError(f"labels shape {labels.shape} != ({m},)")
    if labels.min() < 0 or labels.max() >= n_classes:
        raise ValueError(f"labels must lie in 0..{n_classes - 1}")
    if c <= 0:
        raise ValueError(f"C must be positive, got {c}")

    dim = x.shape[1]
    lam = 1.0 / (c * m)
    order = np.random.default_rng(seed).permutation(m)
    xb = np.hstack([x, np.ones((m, 1))])  # bias as a constant feature

    weights = np.zeros((n_classes, dim), dtype=np.float64)
    biases = np.zeros(n_classes, dtype=np.float64)
    trace = np.zeros((n_classes, epochs), dtype=np.float64)

    for cls in range(n_classes):
        y = np.where(labels == cls, 1.0, -1.0)
        w = np.zeros(dim + 1, dtype=np.float64)
        w_sum = np.zeros(dim + 1, dtype=np.float64)
        t = 0
        for epoch in range(epochs):
            for i in order:
                t += 1
                eta = 1.0 / (lam * t)
                yi = y[i]
                violated = yi * (w @ xb[i]) < 1.0
                w *= 1.0 - eta * lam
                if violated:
                    w += eta * yi * xb[i]
                w_sum += w
            trace[cls, epoch] = _objective(w_sum / t, xb, y, lam)
        avg = w_sum / t
        weights[cls] = avg[:dim]
        biases[cls] = avg[dim]

    return LinearSvmModel(
        weights.astype(np.float32), biases.astype(np.float32), float(c), trace
    )


def svm_predict_batch(
    model: LinearSvmModel,
    histograms: np.ndarray,
    variant: LoopVariant | str = LoopVariant.NARROW,
) -> np.ndarray:
    """Predicted class id per row; argmax of scores, ties to the lowest id."""
    h = np.asarray(histograms, dtype=np.float32)
    if h.ndim == 1:
        h = h[None, :]
    if h.shape[1] != model.dim:
        raise ValueError(f"feature dim {h.shape[1]} != model dim {model.dim}")
    scores = score_batch(h, model.weights, model.biases, variant)
    return np.argmax(scores, axis=1).astype(np.int64)


def svm_predict(
    model: LinearSvmModel,
    histogram: np.ndarray,
    variant: LoopVariant | str = LoopVariant.NARROW,
) -> int:
    return int(svm_predict_batch(model, histogram, variant)[0])
