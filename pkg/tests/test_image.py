"""Image containers, PNM/CIFAR codecs, and the pinned synthetic generator."""

import numpy as np
import pytest

from widevec.image import (
    CIFAR_RECORD_BYTES,
    CifarRecord,
    FormatError,
    ImageU8,
    cifar_to_gray,
    read_cifar10,
    read_pnm,
    synth_image,
    synth_labeled_records,
    write_pnm,
)

# First 16 low bytes of the splitmix64 stream, frozen from an independent
# pure-integer reference implementation.
GOLDEN_SEED0 = [175, 244, 79, 236, 155, 234, 225, 60, 195, 166, 9, 246, 123, 47, 25, 171]
GOLDEN_SEED42 = [149, 3, 82, 148, 242, 6, 93, 164, 213, 174, 191, 190, 230, 183, 220, 242]


# ---------------------------------------------------------------------------
# containers


def test_image_validation():
    with pytest.raises(ValueError):
        ImageU8(0, 4, 1, np.zeros(0, np.uint8))
    with pytest.raises(ValueError):
        ImageU8(2, 2, 2, np.zeros(8, np.uint8))
    with pytest.raises(ValueError):
        ImageU8(2, 2, 1, np.zeros(5, np.uint8))
    img = ImageU8(2, 3, 1, np.arange(6, dtype=np.uint8))
    with pytest.raises(ValueError):
        img.data[0] = 9


def test_cifar_record_validation():
    with pytest.raises(ValueError):
        CifarRecord(0, np.zeros(10, np.uint8))


# ---------------------------------------------------------------------------
# PNM


def test_read_p5_example():
    data = b"P5\n2 2\n255\n" + bytes([0, 64, 128, 255])
    img = read_pnm(data)
    assert (img.width, img.height, img.channels) == (2, 2, 1)
    assert img.data.tolist() == [0, 64, 128, 255]


def test_pnm_roundtrip_random():
    rng = np.random.default_rng(5)
    for i in range(20):
        ch = 1 if i % 2 == 0 else 3
        img = synth_image(int(rng.integers(1, 40)), int(rng.integers(1, 40)), ch, i)
        assert read_pnm(write_pnm(img)) == img


def test_pnm_comments_and_whitespace():
    data = b"P5 # magic comment\n# full line\n  2\t2 # dims\n255 " + bytes(4)
    img = read_pnm(data)
    assert (img.width, img.height) == (2, 2)


def test_pnm_errors():
    with pytest.raises(FormatError) as ei:
        read_pnm(b"P4\n2 2\n255\n" + bytes(4))
    assert ei.value.offset == 0
    with pytest.raises(FormatError):
        read_pnm(b"P6\n2 2\n65535\n" + bytes(24))
    with pytest.raises(FormatError) as ei:
        read_pnm(b"P5\n2 2\n255\n" + bytes(3))  # truncated
    assert ei.value.offset == len(b"P5\n2 2\n255\n") + 3
    with pytest.raises(FormatError):
        read_pnm(b"P5\n2 2\n255\n" + bytes(5))  # trailing
    with pytest.raises(FormatError):
        read_pnm(b"P5\nx 2\n255\n" + bytes(4))
    with pytest.raises(FormatError):
        read_pnm(b"P5\n0 2\n255\n")


def test_readers_total_over_fuzz_bytes():
    rng = np.random.default_rng(17)
    for n in (0, 1, 2, 7, 20, 100, 4000):
        for _ in range(30):
            blob = rng.integers(0, 256, size=n, dtype=np.int64).astype(np.uint8).tobytes()
            for reader in (read_pnm, read_cifar10):
                try:
                    reader(blob)
                except FormatError:
                    pass  # typed failure is the contract


# ---------------------------------------------------------------------------
# CIFAR-10


def _record_bytes(label, r, g, b):
    return bytes([label]) + bytes([r] * 1024) + bytes([g] * 1024) + bytes([b] * 1024)


def test_cifar_parse_and_gray():
    data = _record_bytes(3, 100, 100, 100) + _record_bytes(9, 255, 255, 255)
    recs = read_cifar10(data)
    assert [r.label for r in recs] == [3, 9]
    g0 = cifar_to_gray(recs[0])
    assert (g0.width, g0.height, g0.channels) == (32, 32, 1)
    assert set(g0.data.tolist()) == {100}  # weights sum to 256
    assert set(cifar_to_gray(recs[1]).data.tolist()) == {255}


def test_cifar_length_and_label_validation():
    with pytest.raises(FormatError):
        read_cifar10(bytes(CIFAR_RECORD_BYTES - 1))
    with pytest.raises(FormatError) as ei:
        read_cifar10(_record_bytes(10, 0, 0, 0))
    assert ei.value.offset == 0


def test_gray_matches_float_weights_within_one_level():
    rng = np.random.default_rng(8)
    blob = rng.integers(0, 256, size=3072, dtype=np.int64).astype(np.uint8)
    rec = CifarRecord(4, blob)
    gray = cifar_to_gray(rec).plane(0).astype(np.float64)
    planes = blob.reshape(3, 32, 32).astype(np.float64)
    ref = 0.299 * planes[0] + 0.587 * planes[1] + 0.114 * planes[2]
    assert np.abs(gray - np.round(ref)).max() <= 1.0


# ---------------------------------------------------------------------------
# synthetic generator


def test_synth_golden_first_16_bytes():
    assert synth_image(4, 4, 1, 0).data.tolist() == GOLDEN_SEED0
    assert synth_image(16, 1, 1, 42).data.tolist() == GOLDEN_SEED42


def test_synth_deterministic_and_seed_sensitive():
    a = synth_image(37, 23, 3, 99)
    b = synth_image(37, 23, 3, 99)
    assert a == b
    c = synth_image(37, 23, 3, 100)
    assert a.data[:64].tolist() != c.data[:64].tolist()


def test_synth_size_law():
    img = synth_image(1920, 1080, 1, 1)
    assert img.data.shape[0] == 2_073_600


# ---------------------------------------------------------------------------
# procedural labeled records


def test_labeled_records_balanced_and_deterministic():
    recs = synth_labeled_records(25, 7)
    assert [r.label for r in recs] == [i % 10 for i in range(25)]
    again = synth_labeled_records(25, 7)
    assert all(
        a.label == b.label and np.array_equal(a.pixels, b.pixels) for a, b in zip(recs, again)
    )
    other = synth_labeled_records(25, 8)
    assert any(not np.array_equal(a.pixels, b.pixels) for a, b in zip(recs, other))
