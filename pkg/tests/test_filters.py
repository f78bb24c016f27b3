"""Gaussian kernels and 2D filtering: oracle equality and algebraic laws."""

import mpmath
import numpy as np
import pytest

from oracles import naive_filter2d
from widevec.filters import (
    BorderPolicy,
    KernelF32,
    auto_sigma,
    filter2d,
    filter2d_float,
    gaussian_kernel,
)
from widevec.image import ImageU8, synth_image
from widevec.variants import LoopVariant

BORDERS = (BorderPolicy.REFLECT101, BorderPolicy.REPLICATE)
VARIANTS = (LoopVariant.SCALAR, LoopVariant.NARROW, LoopVariant.WIDE)


# ---------------------------------------------------------------------------
# kernel construction


def test_kernel_k1_is_unit():
    k = gaussian_kernel(1)
    assert k.coeffs.shape == (1, 1)
    assert k.coeffs[0, 0] == np.float32(1.0)


def test_kernel_even_size_rejected():
    with pytest.raises(ValueError):
        gaussian_kernel(4)
    with pytest.raises(ValueError):
        KernelF32(2, np.zeros((2, 2), np.float32))


def test_kernel_center_max_and_symmetry():
    for k in (3, 5, 7, 9, 11, 13):
        for sigma in (None, 1.0, 2.5):
            kern = gaussian_kernel(k, sigma)
            co = kern.coeffs
            c = k // 2
            assert co[c, c] == co.max()
            # 8-fold symmetry, bitwise
            assert np.array_equal(co, co.T)
            assert np.array_equal(co, np.flipud(co))
            assert np.array_equal(co, np.fliplr(co))
            assert np.array_equal(co, np.rot90(co))
            assert abs(float(co.astype(np.float64).sum()) - 1.0) <= 1e-6


def test_kernel_matches_high_precision_formula():
    # direct formula at 50 digits, normalized, for k=5 sigma=1.0
    mpmath.mp.dps = 50
    sigma = mpmath.mpf(1)
    vals = [
        [mpmath.e ** (-((i - 2) ** 2 + (j - 2) ** 2) / (2 * sigma**2)) for j in range(5)]
        for i in range(5)
    ]
    total = sum(sum(row) for row in vals)
    expected = np.array([[float(v / total) for v in row] for row in vals])
    got = gaussian_kernel(5, 1.0).coeffs.astype(np.float64)
    assert np.abs(got - expected).max() <= 1e-7


def test_auto_sigma_formula():
    assert auto_sigma(3) == pytest.approx(0.3 * ((3 - 1) * 0.5 - 1) + 0.8)
    assert auto_sigma(7) == pytest.approx(0.3 * (3 - 1) + 0.8)


def test_kernel_anchor():
    assert gaussian_kernel(7).anchor == (3, 3)


# ---------------------------------------------------------------------------
# filtering semantics


def test_delta_kernel_is_identity():
    img = synth_image(31, 17, 3, 2)
    delta = np.zeros((3, 3), np.float32)
    delta[1, 1] = 1.0
    for variant in VARIANTS:
        assert filter2d(img, KernelF32(3, delta), variant=variant) == img


def test_constant_image_maps_to_itself_exactly():
    for value in (0, 1, 128, 200, 255):
        img = ImageU8.from_array(np.full((20, 33), value, np.uint8))
        for k in (3, 9, 13):
            out = filter2d(img, gaussian_kernel(k))
            assert out == img, (value, k)


def test_matches_naive_oracle_bytewise():
    rng = np.random.default_rng(1234)
    for trial in range(6):
        ch = 1 if trial % 2 == 0 else 3
        img = synth_image(16, 16, ch, trial)
        for k in (3, 5, 7, 9, 11, 13):
            kern = gaussian_kernel(k)
            for border in BORDERS:
                want = naive_filter2d(img, kern, border)
                got = filter2d(img, kern, border, "scalar")
                assert got == want, (trial, k, border)


def test_variants_bytewise_identical():
    rng = np.random.default_rng(77)
    for _ in range(4):
        w, h = int(rng.integers(16, 70)), int(rng.integers(16, 70))
        img = synth_image(w, h, 1, int(rng.integers(1 << 32)))
        for k in (3, 7):
            kern = gaussian_kernel(k)
            for border in BORDERS:
                ref = filter2d(img, kern, border, "scalar")
                assert filter2d(img, kern, border, "narrow") == ref
                assert filter2d(img, kern, border, "wide") == ref


def test_float_linearity_exact_for_power_of_two():
    img = synth_image(24, 19, 1, 5)
    kern = gaussian_kernel(5)
    base = filter2d_float(img, kern)
    doubled = filter2d_float(img, kern.scaled(2.0))
    assert np.array_equal(doubled, 2.0 * base)  # exact: scaling by 2 is lossless


def test_float_linearity_approximate_generic_scale():
    img = synth_image(24, 19, 1, 6)
    kern = gaussian_kernel(5)
    base = filter2d_float(img, kern)
    scaled = filter2d_float(img, kern.scaled(1.7))
    assert np.allclose(scaled, np.float32(1.7) * base, rtol=2e-5, atol=1e-3)


def test_shift_covariance_on_interior():
    rng = np.random.default_rng(9)
    arr = rng.integers(0, 256, size=(40, 40), dtype=np.int64).astype(np.uint8)
    shifted = np.roll(np.roll(arr, 2, axis=0), 3, axis=1)
    k = 5
    out_a = filter2d(ImageU8.from_array(arr), gaussian_kernel(k)).plane(0)
    out_b = filter2d(ImageU8.from_array(shifted), gaussian_kernel(k)).plane(0)
    margin = k  # stay clear of both borders and the roll seam
    inner_a = out_a[margin:-margin - 2, margin:-margin - 3]
    inner_b = out_b[margin + 2 : out_b.shape[0] - margin, margin + 3 : out_b.shape[1] - margin]
    assert np.array_equal(inner_a, inner_b)


def test_reflect101_fit_precondition():
    img = synth_image(4, 4, 1, 0)
    with pytest.raises(ValueError):
        filter2d(img, gaussian_kernel(9), BorderPolicy.REFLECT101)
    # replicate tolerates any kernel
    filter2d(img, gaussian_kernel(9), BorderPolicy.REPLICATE)


def test_float_debug_plane_shape_and_prequantization():
    img = synth_image(12, 10, 3, 3)
    kern = gaussian_kernel(3)
    plane = filter2d_float(img, kern)
    assert plane.shape == (10, 12, 3)
    assert plane.dtype == np.float32
    quantized = filter2d(img, kern)
    ref = np.clip(np.rint(plane), 0, 255).astype(np.uint8)
    assert np.array_equal(quantized.as_array(), ref)


def test_bad_variant_and_border_rejected():
    img = synth_image(8, 8, 1, 0)
    with pytest.raises(ValueError):
        filter2d(img, gaussian_kernel(3), variant="sse")
    with pytest.raises(ValueError):
        filter2d(img, gaussian_kernel(3), border="wrap")
