"""Image decoding, downscaling and uniform color quantization."""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import BadBinCount, BadParameter, EmptyImage, UnreadableFile, UnsupportedFormat

DEFAULT_BINS = 8
DEFAULT_MAX_DIM = 300


@dataclass(frozen=True, eq=False)
class RawImage:
    """8-bit sRGB image stored as a (height, width, 3) uint8 array."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError(f"expected (H, W, 3) pixel array, got shape {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise EmptyImage(f"image has zero dimension {px.shape[:2]}")
        px = np.ascontiguousarray(px, dtype=np.uint8)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def __eq__(self, other):
        if not isinstance(other, RawImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)


@dataclass(frozen=True, eq=False)
class QuantizedImage:
    """Palette-bin index grid plus the global color histogram.

    ``indices`` has shape (height, width); ``global_hist`` has
    ``bins_per_channel ** 3`` entries.
    """

    indices: np.ndarray
    bins_per_channel: int
    global_hist: np.ndarray

    @classmethod
    def from_indices(cls, indices, bins_per_channel: int = DEFAULT_BINS) -> "QuantizedImage":
        idx = np.ascontiguousarray(indices, dtype=np.int64)
        if idx.ndim != 2 or idx.size == 0:
            raise EmptyImage(f"index grid must be a nonempty 2-D array, got shape {idx.shape}")
        n_bins = bins_per_channel ** 3
        if idx.min() < 0 or idx.max() >= n_bins:
            raise ValueError(f"indices must lie in [0, {n_bins})")
        hist = np.bincount(idx.ravel(), minlength=n_bins)
        idx.setflags(write=False)
        hist.setflags(write=False)
        return cls(idx, bins_per_channel, hist)

    @property
    def height(self) -> int:
        return self.indices.shape[0]

    @property
    def width(self) -> int:
        return self.indices.shape[1]

    @property
    def n_pixels(self) -> int:
        return self.indices.size

    @property
    def palette_size(self) -> int:
        return self.bins_per_channel ** 3

    def __eq__(self, other):
        if not isinstance(other, QuantizedImage):
            return NotImplemented
        return (self.bins_per_channel == other.bins_per_channel
                and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.global_hist, other.global_hist))


def decode_image(path) -> RawImage:
    """Read a PNG/JPEG/BMP file. Alpha is discarded, colors are not touched."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise UnreadableFile(f"{path}: {exc.strerror or exc}") from exc
    try:
        with Image.open(io.BytesIO(data)) as im:
            im.load()
            if im.width < 1 or im.height < 1:
                raise EmptyImage(f"{path}: zero-sized image")
            if im.mode in ("RGBA", "LA", "PA") or (im.mode == "P" and "transparency" in im.info):
                arr = np.asarray(im.convert("RGBA"))[..., :3]
            else:
                arr = np.asarray(im.convert("RGB"))
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        if isinstance(exc, EmptyImage):
            raise
        raise UnsupportedFormat(f"{path}: {exc}") from exc
    return RawImage(arr)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def resize_max(img: RawImage, max_dim: int = DEFAULT_MAX_DIM) -> RawImage:
    """Downscale so the longer side is at most ``max_dim`` (box filter).

    Images already within the limit are returned unchanged; upscaling never
    happens.
    """
    if max_dim < 16:
        raise BadParameter(f"max_dim must be >= 16, got {max_dim}")
    w, h = img.width, img.height
    if max(w, h) <= max_dim:
        return img
    scale = max_dim / max(w, h)
    if w >= h:
        nw, nh = max_dim, max(1, _round_half_up(h * scale))
    else:
        nw, nh = max(1, _round_half_up(w * scale)), max_dim
    out = Image.fromarray(np.asarray(img.pixels)).resize(
        (nw, nh), resample=Image.Resampling.BOX)
    return RawImage(np.asarray(out))


def _check_bins(bins_per_channel: int) -> None:
    if not isinstance(bins_per_channel, (int, np.integer)) or not 2 <= bins_per_channel <= 16:
        raise BadBinCount(f"bins_per_channel must be an integer in [2, 16], got {bins_per_channel!r}")


def quantize(img: RawImage, bins_per_channel: int = DEFAULT_BINS) -> QuantizedImage:
    """Uniform per-channel binning: v -> floor(v * b / 256), index = r*b^2 + g*b + bl."""
    _check_bins(bins_per_channel)
    b = int(bins_per_channel)
    ch = (img.pixels.astype(np.int64) * b) >> 8
    idx = ch[..., 0] * b * b + ch[..., 1] * b + ch[..., 2]
    return QuantizedImage.from_indices(idx, b)


def bin_centers(bins_per_channel: int) -> np.ndarray:
    """Representative channel value for each bin (midpoint of its integer range)."""
    _check_bins(bins_per_channel)
    b = bins_per_channel
    lo = np.array([-(-k * 256 // b) for k in range(b)])
    hi = np.array([-(-(k + 1) * 256 // b) - 1 for k in range(b)])
    return ((lo + hi) // 2).astype(np.uint8)


def palette_color(index: int, bins_per_channel: int = DEFAULT_BINS) -> tuple[int, int, int]:
    """RGB bin-center color for a palette index."""
    b = bins_per_channel
    centers = bin_centers(b)
    r, rem = divmod(int(index), b * b)
    g, bl = divmod(rem, b)
    return int(centers[r]), int(centers[g]), int(centers[bl])


def load_quantized(path, bins_per_channel: int = DEFAULT_BINS,
                   max_dim: int | None = DEFAULT_MAX_DIM) -> QuantizedImage:
    img = decode_image(path)
    if max_dim is not None:
        img = resize_max(img, max_dim)
    return quantize(img, bins_per_channel)
