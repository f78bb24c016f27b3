"""Erosion semantics: oracle equality and morphological laws."""

import numpy as np
import pytest

from oracles import naive_erode
from widevec.image import ImageU8, synth_image
from widevec.morphology import StructuringElement, erode

VARIANTS = ("scalar", "narrow", "wide")


def test_structuring_element():
    assert StructuringElement(1).side == 3
    assert StructuringElement(3).side == 7
    with pytest.raises(ValueError):
        StructuringElement(0)


def test_constant_image_unchanged():
    img = ImageU8.from_array(np.full((25, 31), 77, np.uint8))
    for r in (1, 2, 3):
        assert erode(img, r) == img


def test_single_dark_pixel_dilates_to_window():
    arr = np.full((11, 11), 255, np.uint8)
    arr[5, 5] = 0
    out = erode(ImageU8.from_array(arr), 1).plane(0)
    expected = np.full((11, 11), 255, np.uint8)
    expected[4:7, 4:7] = 0
    assert np.array_equal(out, expected)


def test_multichannel_rejected():
    with pytest.raises(ValueError):
        erode(synth_image(8, 8, 3, 0), 1)


def test_matches_naive_oracle():
    for seed in range(8):
        img = synth_image(32, 32, 1, seed)
        for r in (1, 2, 3):
            want = naive_erode(img, r)
            for variant in VARIANTS:
                assert erode(img, r, variant) == want, (seed, r, variant)


def test_anti_extensivity():
    for seed in range(5):
        img = synth_image(45, 37, 1, seed + 100)
        for r in (1, 2, 3):
            out = erode(img, r)
            assert (out.as_array() <= img.as_array()).all()


def test_monotonicity():
    rng = np.random.default_rng(42)
    for _ in range(20):
        x = rng.integers(0, 256, size=(24, 24), dtype=np.int64).astype(np.uint8)
        y = rng.integers(0, 256, size=(24, 24), dtype=np.int64).astype(np.uint8)
        lo = ImageU8.from_array(np.minimum(x, y))
        hi = ImageU8.from_array(np.maximum(x, y))
        for r in (1, 2):
            assert (erode(lo, r).as_array() <= erode(hi, r).as_array()).all()


def test_composition_r_plus_r_equals_2r():
    for seed in range(6):
        img = synth_image(30, 26, 1, seed + 7)
        twice = erode(erode(img, 1), 1)
        assert twice == erode(img, 2)
        assert erode(erode(img, 2), 1) == erode(img, 3)


def test_row_parallel_matches_sequential():
    from widevec import parallel

    prev = parallel.get_worker_count()
    try:
        img = synth_image(50, 44, 1, 21)
        seq = erode(img, 2, "narrow", run_parallel=False)
        parallel.set_worker_count(4)
        par = erode(img, 2, "narrow", run_parallel=True)
        assert seq == par
    finally:
        parallel.set_worker_count(prev)


def test_variants_identical_and_edge_255_neutral():
    # a bright border region shows the 255-neutral rule: edge pixels keep
    # their in-bounds window minimum, never darker
    arr = np.full((9, 70), 200, np.uint8)
    img = ImageU8.from_array(arr)
    for r in (1, 3):
        outs = [erode(img, r, v) for v in VARIANTS]
        assert outs[0] == outs[1] == outs[2]
        assert (outs[0].as_array() == 200).all()
