"""Image channel: raster decoding and the three descriptors (HOG,
GLCM/Haralick texture statistics, per-channel color histogram), plus
their fixed-order concatenation.

All descriptors are pure functions of pixel data and configuration, so
per-image extraction can run in parallel with no shared state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DataError, DecodeError
from .text_features import FeatureVector

# offsets (dy, dx) used by the combined image vector, in this fixed order
GLCM_OFFSETS: tuple[tuple[int, int], ...] = ((0, 1), (1, 0), (1, 1), (1, -1))


@dataclass(frozen=True)
class Raster:
    width: int
    height: int
    pixels: np.ndarray  # (height, width, 3) uint8


@dataclass(frozen=True)
class GrayRaster:
    width: int
    height: int
    intensities: np.ndarray  # (height, width) uint8


@dataclass(frozen=True)
class HogConfig:
    resize_to: tuple[int, int] = (64, 64)  # (width, height)
    cell: int = 8
    block: int = 2  # cells per block side
    block_stride: int = 1  # in cells
    bins: int = 9
    clip: float = 0.2
    eps: float = 1e-6

    def __post_init__(self):
        if self.resize_to[0] % self.cell or self.resize_to[1] % self.cell:
            raise DataError(
                f"resize dims {self.resize_to} not divisible by cell size {self.cell}"
            )
        if self.bins < 2:
            raise DataError(f"need at least 2 orientation bins, got {self.bins}")


@dataclass(frozen=True)
class ImageConfig:
    hog: HogConfig = field(default_factory=HogConfig)
    glcm_levels: int = 16
    hist_bins: int = 16


@dataclass(frozen=True)
class GlcmMatrix:
    levels: int
    probs: np.ndarray  # (levels, levels) float64, symmetric, sums to 1


@dataclass(frozen=True)
class HaralickFeatures:
    contrast: float
    correlation: float
    energy: float
    homogeneity: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.contrast, self.correlation, self.energy, self.homogeneity)


def load_raster(path) -> Raster:
    """Decode a PNG or JPEG file to 8-bit RGB.

    Alpha is dropped; grayscale files are replicated across channels.
    """
    try:
        with Image.open(path) as im:
            rgb = im.convert("RGB")
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise DecodeError(str(path), str(exc)) from None
    arr = np.asarray(rgb, dtype=np.uint8)
    return Raster(width=arr.shape[1], height=arr.shape[0], pixels=arr)


def to_grayscale(r: Raster) -> GrayRaster:
    """Luma conversion: round(0.299 R + 0.587 G + 0.114 B), half rounds up."""
    p = r.pixels.astype(np.float64)
    luma = 0.299 * p[:, :, 0] + 0.587 * p[:, :, 1] + 0.114 * p[:, :, 2]
    gray = np.clip(np.floor(luma + 0.5), 0, 255).astype(np.uint8)
    return GrayRaster(width=r.width, height=r.height, intensities=gray)


def resize_bilinear(g: GrayRaster, w: int, h: int) -> GrayRaster:
    """Center-aligned bilinear resampling with edge clamping."""
    if w < 1 or h < 1:
        raise DataError(f"target dims must be positive, got {(w, h)}")
    src = g.intensities.astype(np.float64)
    sh, sw = src.shape
    if (sw, sh) == (w, h):
        return GrayRaster(width=w, height=h, intensities=g.intensities.copy())

    def axis_coords(dst_n, src_n):
        coords = (np.arange(dst_n) + 0.5) * (src_n / dst_n) - 0.5
        coords = np.clip(coords, 0.0, src_n - 1.0)
        lo = np.floor(coords).astype(np.int64)
        hi = np.minimum(lo + 1, src_n - 1)
        frac = coords - lo
        return lo, hi, frac

    x0, x1, fx = axis_coords(w, sw)
    y0, y1, fy = axis_coords(h, sh)
    fx = fx[np.newaxis, :]
    fy = fy[:, np.newaxis]
    top = src[np.ix_(y0, x0)] * (1 - fx) + src[np.ix_(y0, x1)] * fx
    bot = src[np.ix_(y1, x0)] * (1 - fx) + src[np.ix_(y1, x1)] * fx
    out = top * (1 - fy) + bot * fy
    out = np.clip(np.floor(out + 0.5), 0, 255).astype(np.uint8)
    return GrayRaster(width=w, height=h, intensities=out)


def _gradients(img: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Centered [-1, 0, 1] differences with edge replication."""
    gx = np.zeros_like(img)
    if img.shape[1] >= 2:
        gx[:, 1:-1] = img[:, 2:] - img[:, :-2]
        gx[:, 0] = img[:, 1] - img[:, 0]
        gx[:, -1] = img[:, -1] - img[:, -2]
    gy = np.zeros_like(img)
    if img.shape[0] >= 2:
        gy[1:-1, :] = img[2:, :] - img[:-2, :]
        gy[0, :] = img[1, :] - img[0, :]
        gy[-1, :] = img[-1, :] - img[-2, :]
    return gx, gy


def hog_descriptor(g: GrayRaster, cfg: HogConfig = HogConfig()) -> FeatureVector:
    """Dalal-Triggs style HOG over the full image.

    Unsigned orientations in [0, 180), magnitude-weighted linear soft
    binning between adjacent bin centers, square cells, overlapping
    blocks normalized with L2-Hys.
    """
    img = g.intensities.astype(np.float64)
    h, w = img.shape
    if h % cfg.cell or w % cfg.cell:
        raise DataError(f"image dims {(w, h)} not divisible by cell size {cfg.cell}")
    gx, gy = _gradients(img)
    mag = np.hypot(gx, gy)
    ang = np.degrees(np.arctan2(gy, gx)) % 180.0

    nb = cfg.bins
    bin_width = 180.0 / nb
    # fractional position between adjacent bin centers (centers at
    # (i + 0.5) * bin_width), circular over the unsigned range
    pos = ang / bin_width - 0.5
    lo = np.floor(pos)
    frac = pos - lo
    b0 = lo.astype(np.int64) % nb
    b1 = (b0 + 1) % nb

    cells_y = h // cfg.cell
    cells_x = w // cfg.cell
    cy = (np.arange(h) // cfg.cell)[:, np.newaxis]
    cx = (np.arange(w) // cfg.cell)[np.newaxis, :]
    cell_index = (cy * cells_x + cx).astype(np.int64)

    hist = np.zeros(cells_y * cells_x * nb, dtype=np.float64)
    np.add.at(hist, (cell_index * nb + b0).ravel(), (mag * (1 - frac)).ravel())
    np.add.at(hist, (cell_index * nb + b1).ravel(), (mag * frac).ravel())
    hist = hist.reshape(cells_y, cells_x, nb)

    blocks_y = (cells_y - cfg.block) // cfg.block_stride + 1
    blocks_x = (cells_x - cfg.block) // cfg.block_stride + 1
    out = np.empty(blocks_y * blocks_x * cfg.block * cfg.block * nb, dtype=np.float64)
    eps2 = cfg.eps * cfg.eps
    k = cfg.block * cfg.block * nb
    pos_out = 0
    for by in range(blocks_y):
        for bx in range(blocks_x):
            y = by * cfg.block_stride
            x = bx * cfg.block_stride
            v = hist[y : y + cfg.block, x : x + cfg.block, :].ravel()
            v = v / np.sqrt(np.dot(v, v) + eps2)
            v = np.minimum(v, cfg.clip)
            v = v / np.sqrt(np.dot(v, v) + eps2)
            out[pos_out : pos_out + k] = v
            pos_out += k
    return FeatureVector.from_dense(out)


def glcm(g: GrayRaster, offset: tuple[int, int], levels: int = 16) -> GlcmMatrix:
    """Symmetric normalized co-occurrence matrix at one (dy, dx) offset."""
    dy, dx = offset
    h, w = g.intensities.shape
    if abs(dy) >= h or abs(dx) >= w:
        raise DataError(f"offset {offset} too large for image dims {(w, h)}")
    q = (g.intensities.astype(np.int64) * levels) // 256
    ys = slice(max(0, -dy), h - max(0, dy))
    xs = slice(max(0, -dx), w - max(0, dx))
    a = q[ys, xs].ravel()
    b = q[ys.start + dy : ys.stop + dy, xs.start + dx : xs.stop + dx].ravel()
    if a.size == 0:
        raise DataError(f"no valid pixel pairs for offset {offset} on dims {(w, h)}")
    counts = np.bincount(a * levels + b, minlength=levels * levels).astype(np.float64)
    counts += np.bincount(b * levels + a, minlength=levels * levels)
    probs = (counts / (2 * a.size)).reshape(levels, levels)
    return GlcmMatrix(levels=levels, probs=probs)


def haralick(m: GlcmMatrix) -> HaralickFeatures:
    """Contrast, correlation, energy and homogeneity of one GLCM.

    A zero-variance matrix (single gray level) has correlation 1 by
    convention.
    """
    p = m.probs
    idx = np.arange(m.levels, dtype=np.float64)
    i = idx[:, np.newaxis]
    j = idx[np.newaxis, :]
    diff = i - j
    contrast = float(np.sum(p * diff * diff))
    energy = float(np.sum(p * p))
    homogeneity = float(np.sum(p / (1.0 + np.abs(diff))))
    pi = p.sum(axis=1)
    pj = p.sum(axis=0)
    mu_i = float(np.dot(idx, pi))
    mu_j = float(np.dot(idx, pj))
    var_i = float(np.dot(idx * idx, pi)) - mu_i * mu_i
    var_j = float(np.dot(idx * idx, pj)) - mu_j * mu_j
    sigma = np.sqrt(max(var_i, 0.0)) * np.sqrt(max(var_j, 0.0))
    if sigma == 0.0:
        correlation = 1.0
    else:
        cross = float(np.sum(i * j * p))
        correlation = (cross - mu_i * mu_j) / sigma
    return HaralickFeatures(
        contrast=contrast,
        correlation=correlation,
        energy=energy,
        homogeneity=homogeneity,
    )


def color_histogram(r: Raster, bins_per_channel: int = 16) -> FeatureVector:
    """Concatenated per-channel histograms, each normalized to sum 1."""
    if bins_per_channel < 1 or 256 % bins_per_channel:
        raise DataError(
            f"bins_per_channel must divide 256, got {bins_per_channel}"
        )
    width = 256 // bins_per_channel
    n = r.pixels.shape[0] * r.pixels.shape[1]
    parts = []
    for c in range(3):
        binned = r.pixels[:, :, c].ravel() // width
        counts = np.bincount(binned, minlength=bins_per_channel).astype(np.float64)
        parts.append(counts / n)
    return FeatureVector.from_dense(np.concatenate(parts))


def image_feature_vector(r: Raster, cfg: ImageConfig = ImageConfig()) -> FeatureVector:
    """[HOG | Haralick over the 4 standard offsets | color histogram].

    HOG and the co-occurrence statistics are computed on the grayscale
    image resized to the HOG canvas; the color histogram uses the
    original raster.  Defaults give 1764 + 16 + 48 = 1828 entries.
    """
    gray = to_grayscale(r)
    rw, rh = cfg.hog.resize_to
    resized = resize_bilinear(gray, rw, rh)
    hog = hog_descriptor(resized, cfg.hog).to_dense()
    texture = []
    for offset in GLCM_OFFSETS:
        texture.extend(haralick(glcm(resized, offset, cfg.glcm_levels)).as_tuple())
    hist = color_histogram(r, cfg.hist_bins).to_dense()
    return FeatureVector.from_dense(
        np.concatenate([hog, np.asarray(texture, dtype=np.float64), hist])
    )
