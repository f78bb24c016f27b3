"""Bag-of-visual-words + linear SVM image classification pipeline."""

from .cluster import Dictionary, kmeans, lloyd_iterations
from .features import quantize_histogram
from .model_io import load_model, save_model
from .pipeline import (
    PipelineConfig,
    PipelineResult,
    STAGES,
    run_pipeline,
    test_pipeline,
    train_pipeline,
)
from .sift import Keypoint, compute_descriptors, detect_keypoints
from .svm import LinearSvmModel, svm_predict, svm_predict_batch, svm_train

__all__ = [
    "Dictionary",
    "Keypoint",
    "LinearSvmModel",
    "PipelineConfig",
    "PipelineResult",
    "STAGES",
    "compute_descriptors",
    "detect_keypoints",
    "kmeans",
    "lloyd_iterations",
    "load_model",
    "quantize_histogram",
    "run_pipeline",
    "save_model",
    "svm_predict",
    "svm_predict_batch",
    "svm_train",
    "test_pipeline",
    "train_pipeline",
]
