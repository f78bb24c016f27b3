"""Benchmark harness: timing policy, speedups, emission, fault handling, CLI."""

from pathlib import Path

import pytest

from widevec.bench.cli import main as cli_main
from widevec.bench.records import BenchRecord, BenchVariant, min_over, speedups
from widevec.bench.runner import (
    BowParams,
    ErodeParams,
    FilterParams,
    run_benchmark,
)
from widevec.bench.tables import emit, format_number
from widevec.bench.timing import clock_resolution, measure
from widevec.image import ImageU8

DATA = Path(__file__).parent / "data"


def _rec(param, variant, t, suite="filter", resolution="1920x1080"):
    return BenchRecord(
        suite, resolution, param, variant, repeats=5, samples=(t, t * 1.25, t * 1.1),
        min_time=t, loop_count=1,
    )


# ---------------------------------------------------------------------------
# timing


def test_clock_resolution_positive_and_cached():
    r1 = clock_resolution()
    r2 = clock_resolution()
    assert r1 == r2
    assert 0 < r1 < 1e-3


def test_measure_repeats_one_is_single_sample():
    samples, loops = measure(lambda: None, repeats=1)
    assert len(samples) == 1
    assert loops >= 1


def test_measure_loops_fast_cells():
    samples, loops = measure(lambda: None, repeats=3)
    # a no-op is far below 100x clock resolution, so it must be looped
    assert loops > 1
    assert len(samples) == 3
    assert all(s > 0 for s in samples)


def test_measure_validates_repeats():
    with pytest.raises(ValueError):
        measure(lambda: None, repeats=0)


def test_min_over_non_increasing():
    samples = (5.0, 3.0, 4.0, 2.0, 6.0)
    mins = [min_over(samples, n) for n in range(1, 6)]
    assert mins == [5.0, 3.0, 3.0, 2.0, 2.0]
    assert all(a >= b for a, b in zip(mins, mins[1:]))
    with pytest.raises(ValueError):
        min_over(samples, 0)
    with pytest.raises(ValueError):
        min_over(samples, 6)


# ---------------------------------------------------------------------------
# speedups


def test_speedup_simple_ratio():
    records = [_rec("3x3", "SeqScalar", 10.0), _rec("3x3", "SeqVector", 2.0)]
    sp = speedups(records)[("filter", "1920x1080", "3x3")]
    assert sp.vectorization == pytest.approx(5.0)
    assert sp.optimization is None


def test_speedup_equal_times_is_one():
    records = [_rec("1", "SeqScalar", 0.5, suite="erode"), _rec("1", "SeqVector", 0.5, suite="erode")]
    sp = speedups(records)[("erode", "1920x1080", "1")]
    assert sp.vectorization == pytest.approx(1.0)


def test_speedup_reference_row_recomputes_from_unrounded():
    # displayed 1,26 / 0,69 / 0,76 -> displayed speedups 1,84 and 0,90
    records = [
        _rec("3x3", "SeqScalar", 1.26),
        _rec("3x3", "SeqVector", 0.69),
        _rec("3x3", "Optim", 0.76),
    ]
    sp = speedups(records)[("filter", "1920x1080", "3x3")]
    assert abs(sp.vectorization - 1.84) <= 0.02
    assert abs(sp.optimization - 0.90) <= 0.02


def test_speedup_missing_baseline_is_none():
    records = [_rec("3x3", "SeqVector", 2.0), _rec("3x3", "Optim", 1.0)]
    sp = speedups(records)[("filter", "1920x1080", "3x3")]
    assert sp.vectorization is None
    assert sp.optimization == pytest.approx(2.0)


def test_failed_cells_excluded_from_speedups():
    bad = _rec("3x3", "SeqVector", 2.0)
    bad.check_failed = "first mismatch at (0, 0)"
    records = [_rec("3x3", "SeqScalar", 10.0), bad]
    assert speedups(records)[("filter", "1920x1080", "3x3")].vectorization is None


def test_variant_parse():
    assert BenchVariant.parse("seqscalar") is BenchVariant.SEQ_SCALAR
    assert BenchVariant.parse("Optim") is BenchVariant.OPTIM
    with pytest.raises(ValueError):
        BenchVariant.parse("Turbo")


# ---------------------------------------------------------------------------
# emission


def test_emit_empty_is_header_only():
    assert emit([], "csv") == b"Resolution,Kernel size\n"


def test_emit_golden_files():
    rows = [("3x3", 1.26, 0.69, 0.76), ("5x5", 2.61, 1.42, 1.79), ("7x7", 4.34, 2.72, 3.29)]
    records = []
    for param, s, v, o in rows:
        records.append(_rec(param, "SeqScalar", s))
        records.append(_rec(param, "SeqVector", v))
        records.append(_rec(param, "Optim", o))
    assert emit(records, "csv") == (DATA / "golden_bench.csv").read_bytes()
    assert emit(records, "markdown") == (DATA / "golden_bench.md").read_bytes()


def test_emit_formats_carry_identical_numbers():
    records = [_rec("3x3", "SeqScalar", 0.0582301), _rec("3x3", "SeqVector", 0.0102)]
    csv_cells = emit(records, "csv").decode().splitlines()[1].split(",")
    md_row = emit(records, "md").decode().splitlines()[2]
    md_cells = [c.strip() for c in md_row.strip("|").split("|")]
    assert csv_cells == md_cells


def test_emit_deterministic():
    records = [_rec("1", "SeqScalar", 0.25, suite="erode")]
    assert emit(records, "csv") == emit(records, "csv")


def test_emit_bow_has_no_resolution_column():
    records = [
        _rec("keypoint detection", "SeqScalar", 9.21, suite="bow", resolution=""),
        _rec("keypoint detection", "SeqVector", 3.54, suite="bow", resolution=""),
    ]
    header = emit(records, "csv").decode().splitlines()[0]
    assert header == "SVM step,SeqScalar,SeqVector,Vectorization speedup"


def test_emit_marks_failed_cells():
    bad = _rec("3x3", "SeqVector", 1.0)
    bad.check_failed = "boom"
    bad.min_time = None
    records = [_rec("3x3", "SeqScalar", 2.0), bad]
    line = emit(records, "csv").decode().splitlines()[1]
    assert "failed" in line
    assert line.endswith("n/a")


def test_format_number_six_significant_digits():
    assert format_number(0.0582301) == "0.0582301"
    assert format_number(1.0) == "1"
    assert format_number(123456.789) == "123457"
    assert format_number(0.123456789) == "0.123457"
    assert format_number(1.26) == "1.26"


# ---------------------------------------------------------------------------
# runner behavior (small workloads)


def test_runner_records_structure_and_order():
    params = FilterParams(64, 48, kernels=(3, 5))
    records = run_benchmark("filter", params, ["SeqScalar", "SeqVector"], repeats=2, seed=1)
    assert len(records) == 4
    assert [r.param for r in records] == ["3x3", "3x3", "5x5", "5x5"]
    for r in records:
        assert r.ok
        assert r.min_time == min(r.samples)
        assert len(r.samples) == r.repeats == 2
        assert r.resolution == "64x48"


def test_runner_rejects_parallel_variants_for_filter_and_erode():
    with pytest.raises(ValueError, match="sequential"):
        run_benchmark("filter", FilterParams(32, 32, (3,)), ["ParScalar"], repeats=1)
    with pytest.raises(ValueError, match="sequential"):
        run_benchmark("erode", ErodeParams(32, 32, (1,)), ["SeqScalar", "ParVector"], repeats=1)


def test_runner_unknown_suite_and_bad_repeats():
    with pytest.raises(ValueError):
        run_benchmark("fft", FilterParams(), ["SeqScalar"], repeats=1)
    with pytest.raises(ValueError):
        run_benchmark("filter", FilterParams(32, 32, (3,)), ["SeqScalar"], repeats=0)


def test_fault_injection_aborts_cell_before_timing_but_others_proceed():
    timed = []

    def hook(workload, variant, out):
        if variant == "SeqVector" and workload[2] == "1":
            arr = out.as_array().copy()
            arr[0, 0, 0] ^= 0xFF
            return ImageU8.from_array(arr)
        return out

    params = ErodeParams(48, 40, radii=(1, 2))
    records = run_benchmark(
        "erode", params, ["SeqScalar", "SeqVector"], repeats=2, seed=3, fault_hook=hook
    )
    by_cell = {(r.param, r.variant): r for r in records}
    bad = by_cell[("1", "SeqVector")]
    assert not bad.ok
    assert "first mismatch at (0, 0)" in bad.check_failed
    assert bad.min_time is None and bad.samples == ()  # timing never started
    for key, r in by_cell.items():
        if key != ("1", "SeqVector"):
            assert r.ok and r.min_time is not None


def test_bow_fault_injection_prediction_wise():
    def hook(workload, variant, preds):
        if variant == "SeqVector":
            preds = preds.copy()
            preds[0] = (preds[0] + 1) % 10
        return preds

    params = BowParams(train_images=12, test_images=4, k_words=8, svm_epochs=5, kmeans_iters=8)
    records = run_benchmark(
        "bow", params, ["SeqScalar", "SeqVector"], repeats=1, seed=0, fault_hook=hook
    )
    vec_cells = [r for r in records if r.variant == "SeqVector"]
    assert vec_cells and all(not r.ok for r in vec_cells)
    assert "test image 0" in vec_cells[0].check_failed
    scalar_cells = [r for r in records if r.variant == "SeqScalar"]
    assert scalar_cells and all(r.ok for r in scalar_cells)


def test_bow_runner_stage_rows():
    params = BowParams(train_images=12, test_images=4, k_words=8, svm_epochs=5, kmeans_iters=8)
    records = run_benchmark("bow", params, ["SeqScalar"], repeats=2, seed=0)
    assert [r.param for r in records] == [
        "keypoint detection",
        "feature generation",
        "prediction",
    ]
    assert all(r.min_time == min(r.samples) for r in records)


def test_bow_runner_reads_cifar_batch_files(tmp_path):
    from widevec.image import synth_labeled_records

    recs = synth_labeled_records(24, 1)
    blob = b"".join(bytes([r.label]) + r.pixels.tobytes() for r in recs)
    batch = tmp_path / "data_batch_1.bin"
    batch.write_bytes(blob)
    params = BowParams(
        train_images=16, test_images=8, k_words=8, svm_epochs=5, kmeans_iters=8,
        cifar_train=batch,
    )
    records = run_benchmark("bow", params, ["SeqScalar"], repeats=1, seed=0)
    assert len(records) == 3
    assert all(r.ok for r in records)


def test_check_only_skips_timing():
    records = run_benchmark(
        "filter", FilterParams(40, 30, (3,)), ["SeqScalar"], repeats=3, check_only=True
    )
    assert all(r.ok and r.min_time is None and r.samples == () for r in records)


# ---------------------------------------------------------------------------
# CLI


def test_cli_filter_csv(tmp_path, capsys):
    out = tmp_path / "t.csv"
    rc = cli_main(
        ["filter", "--resolution", "48x36", "--kernel", "3", "--repeats", "1",
         "--format", "csv", "--out", str(out)]
    )
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "Resolution,Kernel size,SeqScalar,SeqVector,Vectorization speedup"
    assert lines[1].startswith("48x36,3x3,")


def test_cli_rejects_parallel_variant_for_filter(capsys):
    rc = cli_main(["filter", "--resolution", "32x32", "--kernel", "3",
                   "--variants", "ParScalar", "--repeats", "1"])
    assert rc == 2
    assert "sequential" in capsys.readouterr().err


def test_cli_check_only(capsys):
    rc = cli_main(["erode", "--resolution", "40x30", "--radius", "1",
                   "--check-only"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "OK erode 40x30 1 SeqScalar" in out


def test_emulated_flag_set_when_jit_disabled(tmp_path):
    import subprocess
    import sys

    code = (
        "from widevec.bench.runner import run_benchmark, ErodeParams\n"
        "recs = run_benchmark('erode', ErodeParams(24, 18, (1,)), ['SeqScalar'], repeats=1)\n"
        "assert all(r.emulated for r in recs), [r.emulated for r in recs]\n"
        "assert all(r.ok for r in recs)\n"
        "print('emulated-ok')\n"
    )
    env = dict(**__import__('os').environ, NUMBA_DISABLE_JIT="1")
    proc = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env=env, timeout=240
    )
    assert proc.returncode == 0, proc.stderr
    assert "emulated-ok" in proc.stdout
