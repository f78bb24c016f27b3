"""Full bag-of-words + SVM training and testing over CIFAR-shaped records.

Training: detect keypoints and build descriptors per image, cluster all
training descriptors into a k-word dictionary, build normalized word
histograms per image, train the one-vs-rest SVM.  Testing re-runs detection
and feature generation with the training dictionary and predicts classes;
the three test stages (keypoint detection, feature generation = descriptors
plus quantization, prediction) are individually wall-timed.

Per-image stages run through `parallel` over the image index; results land
in per-index slots, so predictions are identical for any worker count.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .. import parallel
from ..image import CifarRecord, cifar_to_gray
from ..variants import LoopVariant
from .cluster import Dictionary, kmeans
from .features import quantize_histogram
from .sift import compute_descriptors, detect_keypoints
from .svm import LinearSvmModel, svm_predict_batch, svm_train

__all__ = [
    "PipelineConfig",
    "PipelineResult",
    "STAGES",
    "train_pipeline",
    "test_pipeline",
    "run_pipeline",
]

STAGES = ("keypoint detection", "feature generation", "prediction")


@dataclass(frozen=True)
class PipelineConfig:
    k_words: int = 50
    kmeans_iters: int = 40
    svm_c: float = 1.0
    svm_epochs: int = 100
    n_classes: int = 10
    variant: LoopVariant = LoopVariant.NARROW
    run_parallel: bool = False


@dataclass(frozen=True)
class PipelineResult:
    accuracy: float
    stage_times: dict[str, float]
    predictions: np.ndarray = field(repr=False)
    labels: np.ndarray = field(repr=False)


def _for_each_image(n: int, body, run_parallel: bool):
    if n == 0:
        return
    if run_parallel and parallel.get_worker_count() > 1:
        grain = max(1, -(-n // parallel.get_worker_count()))
        parallel.parallel_for(parallel.RangeJob(0, n, grain), body)
    else:
        body(0, n)


def _detect_all(grays, cfg: PipelineConfig):
    kps = [None] * len(grays)

    def body(lo, hi):
        for i in range(lo, hi):
            kps[i] = detect_keypoints(grays[i])

    _for_each_image(len(grays), body, cfg.run_parallel)
    return kps


def _describe_all(grays, kps, cfg: PipelineConfig):
    descs = [None] * len(grays)

    def body(lo, hi):
        for i in range(lo, hi):
            descs[i] = compute_descriptors(grays[i], kps[i])

    _for_each_image(len(grays), body, cfg.run_parallel)
    return descs


def _histogram_all(descs, dictionary: Dictionary, cfg: PipelineConfig):
    hists = np.zeros((len(descs), dictionary.k), dtype=np.float32)

    def body(lo, hi):
        for i in range(lo, hi):
            hists[i] = quantize_histogram(descs[i], dictionary, cfg.variant)

    _for_each_image(len(descs), body, cfg.run_parallel)
    return hists


def train_pipeline(
    train_records: list[CifarRecord],
    seed: int = 0,
    config: PipelineConfig | None = None,
) -> tuple[Dictionary, LinearSvmModel]:
    """Training steps 1-5: detect, describe, cluster, histogram, fit SVM."""
    cfg = config or PipelineConfig()
    if not train_records:
        raise ValueError("empty training set")
    grays = [cifar_to_gray(r) for r in train_records]
    labels = np.array([r.label for r in train_records], dtype=np.int64)

    kps = _detect_all(grays, cfg)
    descs = _describe_all(grays, kps, cfg)
    stacked = [d for d in descs if d.shape[0] > 0]
    if not stacked:
        raise ValueError("no descriptors found in the training set")
    all_descs = np.concatenate(stacked, axis=0)
    if all_descs.shape[0] < cfg.k_words:
        raise ValueError(
            f"only {all_descs.shape[0]} descriptors for k={cfg.k_words} words"
        )
    dictionary = kmeans(
        all_descs, cfg.k_words, cfg.kmeans_iters, seed, cfg.variant, cfg.run_parallel
    )
    hists = _histogram_all(descs, dictionary, cfg)
    model = svm_train(hists, labels, cfg.svm_c, cfg.svm_epochs, seed, cfg.n_classes)
    return dictionary, model


def test_pipeline(
    test_records: list[CifarRecord],
    dictionary: Dictionary,
    model: LinearSvmModel,
    config: PipelineConfig | None = None,
) -> tuple[np.ndarray, dict[str, float]]:
    """Testing steps 1-3 with per-stage wall times; returns (predictions, times)."""
    cfg = config or PipelineConfig()
    if not test_records:
        raise ValueError("empty test set")
    grays = [cifar_to_gray(r) for r in test_records]

    t0 = time.perf_counter()
    kps = _detect_all(grays, cfg)
    t1 = time.perf_counter()
    descs = _describe_all(grays, kps, cfg)
    hists = _histogram_all(descs, dictionary, cfg)
    t2 = time.perf_counter()
    preds = svm_predict_batch(model, hists, cfg.variant)
    t3 = time.perf_counter()

    times = {
        STAGES[0]: t1 - t0,
        STAGES[1]: t2 - t1,
        STAGES[2]: t3 - t2,
    }
    return preds, times


def run_pipeline(
    train_records: list[CifarRecord],
    test_records: list[CifarRecord],
    k_words: int = 50,
    seed: int = 0,
    config: PipelineConfig | None = None,
) -> PipelineResult:
    """Full train + test cycle; accuracy and test-side stage times."""
    cfg = config or PipelineConfig()
    if cfg.k_words != k_words:
        cfg = PipelineConfig(
            k_words=k_words,
            kmeans_iters=cfg.kmeans_iters,
            svm_c=cfg.svm_c,
            svm_epochs=cfg.svm_epochs,
            n_classes=cfg.n_classes,
            variant=cfg.variant,
            run_parallel=cfg.run_parallel,
        )
    dictionary, model = train_pipeline(train_records, seed, cfg)
    preds, times = test_pipeline(test_records, dictionary, model, cfg)
    labels = np.array([r.label for r in test_records], dtype=np.int64)
    accuracy = float(np.mean(preds == labels))
    return PipelineResult(accuracy, times, preds, labels)
