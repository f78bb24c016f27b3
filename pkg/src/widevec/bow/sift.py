"""Difference-of-Gaussians keypoint detection and gradient descriptors.

A deliberately compact detector: per octave, four Gaussian levels (sigma
ratio 2^(1/3), base sigma 1.6) give three DoG planes, and extrema are
searched in the middle plane only - strict 26-neighbor maxima/minima of
|DoG| >= 0.03 on [0, 1]-scaled intensities, with principal-curvature edge
rejection (trace^2/det ratio 10).  One orientation per keypoint, the peak of
a 36-bin gradient-orientation histogram.  No sub-pixel refinement.

Descriptors are 4x4 spatial cells x 8 orientation bins over a 16x16 sample
grid rotated to the keypoint orientation, with bilinear spatial weighting
and nearest-bin orientation assignment; L2-normalized, clamped at 0.2,
renormalized.  Gradients outside the image are zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..image import ImageU8

__all__ = ["Keypoint", "detect_keypoints", "compute_descriptors", "DESC_LEN"]

SIGMA0 = 1.6
K_STEP = math.sqrt(2.0)  # level 2 sits at exactly 2*sigma0, the octave seam
N_GAUSS = 4  # per octave; gives 3 DoG planes, extrema in the middle one
FIRST_EXPONENT = -1  # octave -1 is the 2x-upsampled input
CONTRAST_THRESH = 0.03
EDGE_RATIO = 10.0
ORI_BINS = 36
ORI_SIGMA_FACTOR = 1.5
MIN_SIZE = 16
MAX_OCTAVES = 8
DESC_GRID = 16  # sample grid side
DESC_CELLS = 4
DESC_ORI_BINS = 8
DESC_CLAMP = 0.2
DESC_LEN = DESC_CELLS * DESC_CELLS * DESC_ORI_BINS  # 128

_LEVEL_SIGMA = SIGMA0 * K_STEP  # blur of the extremum level, octave-relative


@dataclass(frozen=True)
class Keypoint:
    """Detected point in base-image coordinates."""

    x: float
    y: float
    scale: float  # sigma of the detection level, base-image units
    orientation: float  # radians in [0, 2*pi)


def _gauss_blur(plane: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian blur, edge-replicated borders, f32."""
    r = max(1, int(math.ceil(3.0 * sigma)))
    x = np.arange(-r, r + 1, dtype=np.float64)
    taps = np.exp(-(x * x) / (2.0 * sigma * sigma))
    taps = (taps / taps.sum()).astype(np.float32)
    h, w = plane.shape
    padded = np.pad(plane, ((r, r), (0, 0)), mode="edge")
    tmp = np.zeros((h, w), dtype=np.float32)
    for i in range(2 * r + 1):
        tmp += taps[i] * padded[i : i + h, :]
    padded = np.pad(tmp, ((0, 0), (r, r)), mode="edge")
    out = np.zeros((h, w), dtype=np.float32)
    for i in range(2 * r + 1):
        out += taps[i] * padded[:, i : i + w]
    return out


def _gradients(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Central differences with zero padding outside the plane."""
    gx = np.zeros_like(g)
    gy = np.zeros_like(g)
    gx[:, 1:-1] = g[:, 2:] - g[:, :-2]
    gx[:, 0] = g[:, 1]
    gx[:, -1] = -g[:, -2]
    gy[1:-1, :] = g[2:, :] - g[:-2, :]
    gy[0, :] = g[1, :]
    gy[-1, :] = -g[-2, :]
    return gx, gy


def _upsample2(plane: np.ndarray) -> np.ndarray:
    """2x bilinear upsample: even samples copy, odd samples average."""
    h, w = plane.shape
    rows = np.empty((2 * h, w), dtype=np.float32)
    rows[0::2] = plane
    rows[1:-1:2] = 0.5 * (plane[:-1] + plane[1:])
    rows[-1] = plane[-1]
    out = np.empty((2 * h, 2 * w), dtype=np.float32)
    out[:, 0::2] = rows
    out[:, 1:-1:2] = 0.5 * (rows[:, :-1] + rows[:, 1:])
    out[:, -1] = rows[:, -1]
    return out


def _build_octaves(plane01: np.ndarray) -> list[tuple[int, list[np.ndarray]]]:
    """(scale exponent, Gaussian levels) per octave, starting at the
    2x-upsampled input; the next octave is the 2*sigma0 level subsampled 2x."""
    if min(plane01.shape) < MIN_SIZE:
        return []
    octaves = []
    base = _gauss_blur(_upsample2(plane01), SIGMA0)
    exponent = FIRST_EXPONENT
    while min(base.shape) >= MIN_SIZE and len(octaves) < MAX_OCTAVES:
        levels = [base]
        for s in range(1, N_GAUSS):
            lo = SIGMA0 * K_STEP ** (s - 1)
            hi = SIGMA0 * K_STEP**s
            levels.append(_gauss_blur(levels[-1], math.sqrt(hi * hi - lo * lo)))
        octaves.append((exponent, levels))
        base = np.ascontiguousarray(levels[2][::2, ::2])  # level 2 blur is 2*sigma0
        exponent += 1
    return octaves


def _neighbor_extrema(d0: np.ndarray, d1: np.ndarray, d2: np.ndarray) -> np.ndarray:
    """Interior mask of strict 26-neighbor maxima or minima of d1."""
    h, w = d1.shape
    c = d1[1 : h - 1, 1 : w - 1]
    nb_max = np.full(c.shape, -np.inf, dtype=np.float32)
    nb_min = np.full(c.shape, np.inf, dtype=np.float32)
    for plane, skip_center in ((d0, False), (d1, True), (d2, False)):
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                if skip_center and dy == 0 and dx == 0:
                    continue
                v = plane[1 + dy : h - 1 + dy, 1 + dx : w - 1 + dx]
                np.maximum(nb_max, v, out=nb_max)
                np.minimum(nb_min, v, out=nb_min)
    strong = np.abs(c) >= CONTRAST_THRESH
    mask = np.zeros((h, w), dtype=bool)
    mask[1 : h - 1, 1 : w - 1] = strong & ((c > nb_max) | (c < nb_min))
    return mask


def _edge_ok(d1: np.ndarray, ys: np.ndarray, xs: np.ndarray) -> np.ndarray:
    c = d1[ys, xs]
    dxx = d1[ys, xs + 1] + d1[ys, xs - 1] - 2.0 * c
    dyy = d1[ys + 1, xs] + d1[ys - 1, xs] - 2.0 * c
    dxy = 0.25 * (d1[ys + 1, xs + 1] - d1[ys + 1, xs - 1] - d1[ys - 1, xs + 1] + d1[ys - 1, xs - 1])
    tr = dxx + dyy
    det = dxx * dyy - dxy * dxy
    r = EDGE_RATIO
    return (det > 0) & (tr * tr * r < (r + 1.0) * (r + 1.0) * det)


def _orientation(mag, ori, y: int, x: int, radius: int, gweight: np.ndarray) -> float:
    h, w = mag.shape
    y0, y1 = max(0, y - radius), min(h, y + radius + 1)
    x0, x1 = max(0, x - radius), min(w, x + radius + 1)
    gw = gweight[y0 - y + radius : y1 - y + radius, x0 - x + radius : x1 - x + radius]
    m = mag[y0:y1, x0:x1] * gw
    bins = (ori[y0:y1, x0:x1] * (ORI_BINS / (2.0 * math.pi))).astype(np.int64) % ORI_BINS
    hist = np.bincount(bins.ravel(), weights=m.ravel().astype(np.float64), minlength=ORI_BINS)
    peak = int(np.argmax(hist))
    return (peak + 0.5) * (2.0 * math.pi / ORI_BINS)


def _plane01(img: ImageU8) -> np.ndarray:
    if img.channels != 1:
        raise ValueError(f"keypoint detection requires a single channel, got {img.channels}")
    return img.plane(0).astype(np.float32) / np.float32(255.0)


def detect_keypoints(img: ImageU8) -> list[Keypoint]:
    """DoG extrema with orientation, ordered by (y, x, scale)."""
    plane = _plane01(img)
    octaves = _build_octaves(plane)
    ori_radius = int(round(3.0 * ORI_SIGMA_FACTOR * _LEVEL_SIGMA))
    ax = np.arange(-ori_radius, ori_radius + 1, dtype=np.float64)
    sig_w = ORI_SIGMA_FACTOR * _LEVEL_SIGMA
    gweight = np.exp(-(ax[:, None] ** 2 + ax[None, :] ** 2) / (2.0 * sig_w * sig_w))

    found = []
    for exponent, levels in octaves:
        d0 = levels[1] - levels[0]
        d1 = levels[2] - levels[1]
        d2 = levels[3] - levels[2]
        mask = _neighbor_extrema(d0, d1, d2)
        if not mask.any():
            continue
        cand = np.argwhere(mask)  # row-major: (y, x) ascending
        ys, xs = cand[:, 0], cand[:, 1]
        keep = _edge_ok(d1, ys, xs)
        ys, xs = ys[keep], xs[keep]
        if ys.size == 0:
            continue
        gx, gy = _gradients(levels[1])
        mag = np.hypot(gx, gy)
        ori = np.arctan2(gy, gx)
        ori = np.where(ori < 0, ori + 2.0 * math.pi, ori)
        step = float(2.0**exponent)
        for y, x in zip(ys.tolist(), xs.tolist()):
            theta = _orientation(mag, ori, y, x, ori_radius, gweight)
            found.append(Keypoint(x * step, y * step, _LEVEL_SIGMA * step, theta))
    found.sort(key=lambda kp: (kp.y, kp.x, kp.scale))
    return found


def _octave_index(kp: Keypoint, n_octaves: int) -> int:
    e = int(round(math.log2(max(kp.scale, 1e-9) / _LEVEL_SIGMA)))
    return min(max(e - FIRST_EXPONENT, 0), n_octaves - 1)


def _bilinear_grads(gx, gy, py, px):
    """Sample gradient planes at float positions; zero outside."""
    h, w = gx.shape
    y0 = np.floor(py).astype(np.int64)
    x0 = np.floor(px).astype(np.int64)
    fy = py - y0
    fx = px - x0
    sx = np.zeros_like(py)
    sy = np.zeros_like(py)
    for dy, dx, wgt in (
        (0, 0, (1 - fy) * (1 - fx)),
        (0, 1, (1 - fy) * fx),
        (1, 0, fy * (1 - fx)),
        (1, 1, fy * fx),
    ):
        yy = y0 + dy
        xx = x0 + dx
        ok = (yy >= 0) & (yy < h) & (xx >= 0) & (xx < w)
        yc = np.clip(yy, 0, h - 1)
        xc = np.clip(xx, 0, w - 1)
        sx += wgt * np.where(ok, gx[yc, xc], 0.0)
        sy += wgt * np.where(ok, gy[yc, xc], 0.0)
    return sx, sy


def compute_descriptors(img: ImageU8, keypoints: list[Keypoint]) -> np.ndarray:
    """(M, 128) f32 descriptors; degenerate zero-gradient patches are dropped."""
    if not keypoints:
        return np.zeros((0, DESC_LEN), dtype=np.float32)
    plane = _plane01(img)
    octaves = _build_octaves(plane)
    if not octaves:
        return np.zeros((0, DESC_LEN), dtype=np.float32)
    grads = [_gradients(levels[1]) for _, levels in octaves]

    half = DESC_GRID / 2.0  # 8
    offs = np.arange(DESC_GRID, dtype=np.float64) - (half - 0.5)  # -7.5 .. 7.5
    uu, vv = np.meshgrid(offs, offs)  # uu: x offset, vv: y offset
    uu = uu.ravel()
    vv = vv.ravel()
    cell_u = (uu + half) / (DESC_GRID / DESC_CELLS) - 0.5  # cell-space coords
    cell_v = (vv + half) / (DESC_GRID / DESC_CELLS) - 0.5

    out = []
    for kp in keypoints:
        idx = _octave_index(kp, len(octaves))
        gx, gy = grads[idx]
        inv = 2.0 ** (-(idx + FIRST_EXPONENT))
        cx, cy = kp.x * inv, kp.y * inv
        ct, st = math.cos(kp.orientation), math.sin(kp.orientation)
        px = cx + uu * ct - vv * st
        py = cy + uu * st + vv * ct
        sx, sy = _bilinear_grads(gx, gy, py, px)
        mag = np.hypot(sx, sy)
        phi = np.arctan2(sy, sx) - kp.orientation
        phi = np.mod(phi, 2.0 * math.pi)
        ob = (np.floor(phi / (2.0 * math.pi / DESC_ORI_BINS) + 0.5).astype(np.int64)) % DESC_ORI_BINS

        hist = np.zeros((DESC_CELLS, DESC_CELLS, DESC_ORI_BINS), dtype=np.float64)
        cu0 = np.floor(cell_u).astype(np.int64)
        cv0 = np.floor(cell_v).astype(np.int64)
        fu = cell_u - cu0
        fv = cell_v - cv0
        for dv, dx_, wgt in (
            (0, 0, (1 - fv) * (1 - fu)),
            (0, 1, (1 - fv) * fu),
            (1, 0, fv * (1 - fu)),
            (1, 1, fv * fu),
        ):
            cv = cv0 + dv
            cu = cu0 + dx_
            ok = (cv >= 0) & (cv < DESC_CELLS) & (cu >= 0) & (cu < DESC_CELLS)
            if not ok.any():
                continue
            np.add.at(hist, (cv[ok], cu[ok], ob[ok]), (wgt * mag)[ok])

        v = hist.ravel()
        norm = np.linalg.norm(v)
        if norm < 1e-12:
            continue  # zero-gradient patch: flagged degenerate, dropped
        v = np.minimum(v / norm, DESC_CLAMP)
        v /= np.linalg.norm(v)
        out.append(v.astype(np.float32))
    if not out:
        return np.zeros((0, DESC_LEN), dtype=np.float32)
    return np.stack(out)
