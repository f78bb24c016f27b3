"""Benchmark suite drivers: correctness-checked, min-of-N timed cells.

Every (workload, variant) cell is checked against the sequential scalar
reference output (bytewise for filter/erode, prediction-wise for bow)
before any timing run; a failed check aborts that cell with a diagnostic
and the remaining cells proceed.  Parallel variants exist only for the bow
suite; filtering and erosion are benchmarked sequentially.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .. import parallel
from .._jit import jit_active
from ..filters import BorderPolicy, filter2d, gaussian_kernel
from ..image import CifarRecord, read_cifar10, synth_image, synth_labeled_records
from ..morphology import erode
from ..bow.pipeline import PipelineConfig, STAGES, test_pipeline, train_pipeline
from .records import BenchRecord, BenchVariant
from .timing import measure

__all__ = [
    "FilterParams",
    "ErodeParams",
    "BowParams",
    "run_benchmark",
    "DEFAULT_KERNELS",
    "DEFAULT_RADII",
]

DEFAULT_KERNELS = (3, 5, 7, 9, 11, 13)
DEFAULT_RADII = (1, 2, 3)

# hook(workload, variant_name, output) -> output; test-only fault injection
FaultHook = Callable[[tuple[str, str, str], str, object], object]


@dataclass(frozen=True)
class FilterParams:
    width: int = 1920
    height: int = 1080
    kernels: tuple[int, ...] = DEFAULT_KERNELS
    border: BorderPolicy = BorderPolicy.REFLECT101
    channels: int = 1


@dataclass(frozen=True)
class ErodeParams:
    width: int = 1920
    height: int = 1080
    radii: tuple[int, ...] = DEFAULT_RADII


@dataclass(frozen=True)
class BowParams:
    train_images: int = 40
    test_images: int = 20
    k_words: int = 50
    svm_epochs: int = 100
    kmeans_iters: int = 40
    cifar_train: Path | None = None
    cifar_test: Path | None = None


def _first_image_diff(got, want) -> str:
    a = got.data
    b = want.data
    if a.shape != b.shape:
        return f"shape mismatch: got {got.width}x{got.height}x{got.channels}"
    bad = np.flatnonzero(a != b)
    i = int(bad[0])
    c = got.channels
    x = (i // c) % got.width
    y = i // (c * got.width)
    return f"first mismatch at ({x}, {y}) ch {i % c}: got {a[i]}, want {b[i]} ({bad.size} pixels differ)"


def _first_pred_diff(got: np.ndarray, want: np.ndarray) -> str:
    bad = np.flatnonzero(got != want)
    i = int(bad[0])
    return f"first mismatch at test image {i}: got class {got[i]}, want {want[i]} ({bad.size} differ)"


def _validate_variants(suite: str, variants: list[BenchVariant]):
    if suite in ("filter", "erode"):
        par = [v.value for v in variants if v in (BenchVariant.PAR_SCALAR, BenchVariant.PAR_VECTOR)]
        if par:
            raise ValueError(
                f"{suite} is benchmarked sequentially; parallel variants not offered: {par}"
            )


def _flags(is_parallel: bool = False) -> dict:
    return {
        "emulated": not jit_active(),
        "pinned": is_parallel and parallel.pinning_active(),
    }


def _run_checked_cells(
    workloads: list[tuple[tuple[str, str, str], dict[str, Callable[[], object]], object, Callable]],
    variants: list[BenchVariant],
    repeats: int,
    check_only: bool,
    fault_hook: FaultHook | None,
) -> list[BenchRecord]:
    """Shared cell loop: check against reference, then time."""
    records = []
    for workload, runners, reference, diff_fn in workloads:
        suite, resolution, param = workload
        for bv in variants:
            run = runners[bv.value]
            out = run()
            if fault_hook is not None:
                out = fault_hook(workload, bv.value, out)
            rec = BenchRecord(suite, resolution, param, bv.value, **_flags(bv.is_parallel))
            if not _outputs_equal(out, reference):
                rec.check_failed = diff_fn(out, reference)
                records.append(rec)
                continue
            if not check_only:
                samples, loops = measure(run, repeats)
                rec.repeats = repeats
                rec.samples = tuple(samples)
                rec.min_time = min(samples)
                rec.loop_count = loops
                rec.pinned = bv.is_parallel and parallel.pinning_active()
            records.append(rec)
    return records


def _outputs_equal(a, b) -> bool:
    if isinstance(a, np.ndarray):
        return isinstance(b, np.ndarray) and np.array_equal(a, b)
    return a == b


def run_filter_suite(
    params: FilterParams,
    variants: list[BenchVariant],
    repeats: int,
    seed: int,
    check_only: bool = False,
    fault_hook: FaultHook | None = None,
) -> list[BenchRecord]:
    img = synth_image(params.width, params.height, params.channels, seed)
    resolution = f"{params.width}x{params.height}"
    workloads = []
    for k in params.kernels:
        kern = gaussian_kernel(k)
        reference = filter2d(img, kern, params.border, "scalar")
        runners = {
            bv.value: (lambda kern=kern, bv=bv: filter2d(img, kern, params.border, bv.loop_variant))
            for bv in variants
        }
        workloads.append((("filter", resolution, f"{k}x{k}"), runners, reference, _first_image_diff))
    return _run_checked_cells(workloads, variants, repeats, check_only, fault_hook)


def run_erode_suite(
    params: ErodeParams,
    variants: list[BenchVariant],
    repeats: int,
    seed: int,
    check_only: bool = False,
    fault_hook: FaultHook | None = None,
) -> list[BenchRecord]:
    img = synth_image(params.width, params.height, 1, seed)
    resolution = f"{params.width}x{params.height}"
    workloads = []
    for r in params.radii:
        reference = erode(img, r, "scalar")
        runners = {
            bv.value: (lambda r=r, bv=bv: erode(img, r, bv.loop_variant)) for bv in variants
        }
        workloads.append((("erode", resolution, str(r)), runners, reference, _first_image_diff))
    return _run_checked_cells(workloads, variants, repeats, check_only, fault_hook)


def _load_bow_records(params: BowParams, seed: int) -> tuple[list[CifarRecord], list[CifarRecord]]:
    if params.cifar_train is not None:
        train = read_cifar10(Path(params.cifar_train).read_bytes())[: params.train_images]
        test_src = params.cifar_test if params.cifar_test is not None else params.cifar_train
        test_all = read_cifar10(Path(test_src).read_bytes())
        if params.cifar_test is None:
            test = test_all[params.train_images : params.train_images + params.test_images]
        else:
            test = test_all[: params.test_images]
        return train, test
    recs = synth_labeled_records(params.train_images + params.test_images, seed)
    return recs[: params.train_images], recs[params.train_images :]


def run_bow_suite(
    params: BowParams,
    variants: list[BenchVariant],
    repeats: int,
    seed: int,
    check_only: bool = False,
    fault_hook: FaultHook | None = None,
) -> list[BenchRecord]:
    train, test = _load_bow_records(params, seed)

    def cfg(bv: BenchVariant) -> PipelineConfig:
        return PipelineConfig(
            k_words=params.k_words,
            kmeans_iters=params.kmeans_iters,
            svm_epochs=params.svm_epochs,
            variant=bv.loop_variant,
            run_parallel=bv.is_parallel,
        )

    # train once with the scalar reference configuration; the dictionary and
    # model are bitwise independent of the variant, and only the test side is
    # benchmarked (training is offline)
    dictionary, model = train_pipeline(train, seed, cfg(BenchVariant.SEQ_SCALAR))
    ref_preds, _ = test_pipeline(test, dictionary, model, cfg(BenchVariant.SEQ_SCALAR))

    records = []
    for bv in variants:
        c = cfg(bv)
        flags = _flags(bv.is_parallel)
        preds, _ = test_pipeline(test, dictionary, model, c)
        if fault_hook is not None:
            preds = fault_hook(("bow", "", "predictions"), bv.value, preds)
        if not np.array_equal(preds, ref_preds):
            msg = _first_pred_diff(preds, ref_preds)
            for stage in STAGES:
                records.append(
                    BenchRecord("bow", "", stage, bv.value, check_failed=msg, **flags)
                )
            continue
        if check_only:
            for stage in STAGES:
                records.append(BenchRecord("bow", "", stage, bv.value, **flags))
            continue
        stage_samples: dict[str, list[float]] = {s: [] for s in STAGES}
        test_pipeline(test, dictionary, model, c)  # warm-up, excluded
        for _ in range(repeats):
            _, times = test_pipeline(test, dictionary, model, c)
            for s in STAGES:
                stage_samples[s].append(times[s])
        pinned = bv.is_parallel and parallel.pinning_active()
        for stage in STAGES:
            samples = tuple(stage_samples[stage])
            records.append(
                BenchRecord(
                    "bow",
                    "",
                    stage,
                    bv.value,
                    repeats=repeats,
                    samples=samples,
                    min_time=min(samples),
                    loop_count=1,
                    emulated=flags["emulated"],
                    pinned=pinned,
                )
            )
    return records


def run_benchmark(
    suite: str,
    params,
    variants,
    repeats: int = 5,
    seed: int = 12345,
    check_only: bool = False,
    fault_hook: FaultHook | None = None,
) -> list[BenchRecord]:
    """Run one suite; returns one record per (workload, variant) cell."""
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    variants = [BenchVariant.parse(v) for v in variants]
    _validate_variants(suite, variants)
    if suite == "filter":
        return run_filter_suite(params, variants, repeats, seed, check_only, fault_hook)
    if suite == "erode":
        return run_erode_suite(params, variants, repeats, seed, check_only, fault_hook)
    if suite == "bow":
        return run_bow_suite(params, variants, repeats, seed, check_only, fault_hook)
    raise ValueError(f"unknown suite {suite!r}; expected filter, erode, or bow")
