"""Mutual information between colors and rectangular regions, and greedy
straight-cut dissection.

All quantities are in bits. A partition of the canvas into regions R and the
pixel color C define the channel whose mutual information I(R;C) each cut
increases.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateCut, NotAPartition, RegionOutOfBounds, RegionTooSmall
from .ingest import QuantizedImage

# Gains closer than this are ties, resolved by the deterministic cut order.
GAIN_TOL = 1e-12


class Direction(str, enum.Enum):
    HORIZONTAL = "Horizontal"
    VERTICAL = "Vertical"

    @property
    def letter(self) -> str:
        return self.value[0]


class Region(NamedTuple):
    """Half-open pixel rectangle [x0, x1) x [y0, y1)."""

    x0: int
    y0: int
    x1: int
    y1: int

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0

    @property
    def area(self) -> int:
        return self.width * self.height

    @classmethod
    def full(cls, img: QuantizedImage) -> "Region":
        return cls(0, 0, img.width, img.height)

    def check_within(self, img: QuantizedImage) -> None:
        if not (0 <= self.x0 < self.x1 <= img.width and 0 <= self.y0 < self.y1 <= img.height):
            raise RegionOutOfBounds(f"{self} outside {img.width}x{img.height} image")

    def split(self, cut: "Cut") -> tuple["Region", "Region"]:
        """Children in (top, bottom) or (left, right) order."""
        k = cut.offset
        if cut.direction is Direction.HORIZONTAL:
            if not self.y0 < k < self.y1:
                raise DegenerateCut(f"horizontal offset {k} not inside rows ({self.y0}, {self.y1})")
            return Region(self.x0, self.y0, self.x1, k), Region(self.x0, k, self.x1, self.y1)
        if not self.x0 < k < self.x1:
            raise DegenerateCut(f"vertical offset {k} not inside columns ({self.x0}, {self.x1})")
        return Region(self.x0, self.y0, k, self.y1), Region(k, self.y0, self.x1, self.y1)


@dataclass(frozen=True)
class ColorHistogram:
    counts: np.ndarray
    total: int


@dataclass(frozen=True)
class Cut:
    direction: Direction
    offset: int
    gain_bits: float = 0.0


@dataclass(frozen=True)
class CutStep:
    step: int  # 1-based application order
    parent: Region
    cut: Cut


@dataclass(frozen=True)
class DissectionResult:
    width: int
    height: int
    cuts: list[CutStep]
    leaves: list[Region]
    cumulative_mi_bits: list[float]
    entropy_bits: float

    @property
    def gains_bits(self) -> list[float]:
        return [s.cut.gain_bits for s in self.cuts]

    @property
    def n_cuts(self) -> int:
        return len(self.cuts)


# ---------------------------------------------------------------------------
# direct definitions

def region_histogram(img: QuantizedImage, r: Region) -> ColorHistogram:
    r = Region(*r)
    r.check_within(img)
    block = img.indices[r.y0:r.y1, r.x0:r.x1]
    counts = np.bincount(block.ravel(), minlength=img.palette_size)
    return ColorHistogram(counts, int(block.size))


def _entropy_of_counts(counts: np.ndarray) -> float:
    counts = counts[counts > 0]
    if counts.size == 0:
        return 0.0
    p = counts / counts.sum()
    return float(max(0.0, -(p * np.log2(p)).sum()))


def global_entropy(img: QuantizedImage) -> float:
    """H(C) of the global color distribution."""
    return _entropy_of_counts(np.asarray(img.global_hist))


def _kl_to_global(counts: np.ndarray, global_p: np.ndarray) -> float:
    """D(p(c|r) || p(c)) in bits."""
    mask = counts > 0
    q = counts[mask] / counts.sum()
    return float((q * np.log2(q / global_p[mask])).sum())


def _check_partition(img: QuantizedImage, regions) -> list[Region]:
    regions = [Region(*r) for r in regions]
    if not regions:
        raise NotAPartition("empty region list")
    cover = np.zeros((img.height, img.width), dtype=np.int32)
    for r in regions:
        r.check_within(img)
        cover[r.y0:r.y1, r.x0:r.x1] += 1
    if cover.max() > 1:
        raise NotAPartition("regions overlap")
    if cover.min() < 1:
        raise NotAPartition("regions leave a gap")
    return regions


def partition_mutual_information(img: QuantizedImage, regions) -> float:
    """I(R;C) = sum_r p(r) D(p(c|r) || p(c)) for a tiling of the canvas."""
    regions = _check_partition(img, regions)
    n = img.n_pixels
    global_p = np.asarray(img.global_hist) / n
    total = 0.0
    for r in regions:
        h = region_histogram(img, r)
        total += h.total / n * _kl_to_global(h.counts, global_p)
    return total


def split_gain(img: QuantizedImage, r: Region, c: Cut) -> float:
    """MI increase from splitting leaf ``r`` with cut ``c``."""
    r = Region(*r)
    r.check_within(img)
    a, b = r.split(c)
    n = img.n_pixels
    global_p = np.asarray(img.global_hist) / n
    gain = 0.0
    for sub, sign in ((a, 1.0), (b, 1.0), (r, -1.0)):
        h = region_histogram(img, sub)
        gain += sign * h.total / n * _kl_to_global(h.counts, global_p)
    return max(0.0, gain)


# ---------------------------------------------------------------------------
# incremental scanner

def _xlogx(c: np.ndarray) -> np.ndarray:
    c = c.astype(np.float64)
    return c * np.log2(np.maximum(c, 1.0))


class _Scanner:
    """Sweeps running histograms across a region to score every straight cut.

    For a leaf with histogram h and n pixels, S(h) = n log n - sum_c h_c log h_c
    is n times its conditional color entropy; a cut's gain is the drop
    (S(parent) - S(top) - S(bottom)) / N. Labels are compacted to the colors
    actually present so the sweep width is the number of distinct colors.
    """

    def __init__(self, img: QuantizedImage):
        present, inverse = np.unique(img.indices, return_inverse=True)
        self.labels = inverse.reshape(img.indices.shape).astype(np.int64)
        self.k = int(present.size)
        self.n = img.n_pixels
        self.width = img.width
        self.height = img.height

    def _line_hist(self, r: Region, axis: int) -> np.ndarray:
        block = self.labels[r.y0:r.y1, r.x0:r.x1]
        if axis == 1:
            block = block.T
        lines = block.shape[0]
        keys = (np.arange(lines, dtype=np.int64)[:, None] * self.k + block).ravel()
        return np.bincount(keys, minlength=lines * self.k).reshape(lines, self.k)

    @staticmethod
    def _spread(counts: np.ndarray, sizes: np.ndarray) -> np.ndarray:
        return _xlogx(sizes) - _xlogx(counts).sum(axis=-1)

    def gains(self, r: Region, direction: Direction) -> np.ndarray:
        """Gain for every interior offset; entry j is the cut at (start + 1 + j)."""
        axis = 0 if direction is Direction.HORIZONTAL else 1
        lines = self._line_hist(r, axis)
        if lines.shape[0] < 2:
            return np.empty(0)
        line_len = r.width if axis == 0 else r.height
        first = np.cumsum(lines, axis=0)
        total = first[-1]
        first = first[:-1]
        second = total - first
        n_first = np.arange(1, lines.shape[0], dtype=np.int64) * line_len
        n_second = r.area - n_first
        parent = self._spread(total, np.int64(r.area))
        # summed before subtracting so mirrored regions give bit-identical gains
        g = (parent - (self._spread(first, n_first) + self._spread(second, n_second))) / self.n
        return np.maximum(g, 0.0)

    def candidates(self, r: Region, min_leaf_px: int = 1):
        """Yield (direction, offsets, gains) restricted to admissible offsets."""
        for direction in (Direction.HORIZONTAL, Direction.VERTICAL):
            start, stop = (r.y0, r.y1) if direction is Direction.HORIZONTAL else (r.x0, r.x1)
            g = self.gains(r, direction)
            offsets = np.arange(start + 1, stop, dtype=np.int64)
            keep = (offsets - start >= min_leaf_px) & (stop - offsets >= min_leaf_px)
            yield direction, offsets[keep], g[keep]


def _order_key(direction: Direction, offset: int, leaf: Region):
    return (0 if direction is Direction.HORIZONTAL else 1, offset, leaf.y0, leaf.x0)


def _pick(pool):
    """pool: list of (leaf, direction, offsets, gains). Returns (leaf, Cut) or None."""
    best_gain = -np.inf
    for _, _, _, g in pool:
        if g.size:
            best_gain = max(best_gain, float(g.max()))
    if best_gain == -np.inf:
        return None
    choice = None
    for leaf, direction, offsets, g in pool:
        hits = np.flatnonzero(g >= best_gain - GAIN_TOL)
        if hits.size == 0:
            continue
        j = int(hits[0])  # offsets ascend, so the first hit is the smallest offset
        key = _order_key(direction, int(offsets[j]), leaf)
        if choice is None or key < choice[0]:
            choice = (key, leaf, Cut(direction, int(offsets[j]), float(g[j])))
    return choice[1], choice[2]


def best_cut(img: QuantizedImage, r: Region | None = None) -> Cut:
    """Exhaustive search over every interior horizontal and vertical offset.

    Ties (within ``GAIN_TOL``) go to Horizontal, then the smaller offset.
    """
    r = Region.full(img) if r is None else Region(*r)
    r.check_within(img)
    if r.width < 2 and r.height < 2:
        raise RegionTooSmall(f"{r} has no interior offset")
    scanner = _Scanner(img)
    pool = [(r, d, o, g) for d, o, g in scanner.candidates(r)]
    return _pick(pool)[1]


def dissect(img: QuantizedImage, max_cuts: int = 2, min_gain_bits: float = 0.0,
            min_leaf_px: int = 1) -> DissectionResult:
    """Greedy sequential dissection.

    Every step scores all admissible cuts of every current leaf and applies
    the single cut with the largest gain. Stops after ``max_cuts`` cuts or
    when no admissible cut gains more than ``min_gain_bits``.
    """
    if max_cuts < 1:
        raise ValueError(f"max_cuts must be >= 1, got {max_cuts}")
    if min_gain_bits < 0:
        raise ValueError(f"min_gain_bits must be >= 0, got {min_gain_bits}")
    if min_leaf_px < 1:
        raise ValueError(f"min_leaf_px must be >= 1, got {min_leaf_px}")

    scanner = _Scanner(img)
    leaves = [Region.full(img)]
    cache: dict[Region, list] = {}
    steps: list[CutStep] = []
    cumulative: list[float] = []
    mi = 0.0

    for step in range(1, max_cuts + 1):
        pool = []
        for leaf in leaves:
            if leaf not in cache:
                cache[leaf] = list(scanner.candidates(leaf, min_leaf_px))
            pool.extend((leaf, d, o, g) for d, o, g in cache[leaf])
        picked = _pick(pool)
        if picked is None:
            break
        leaf, cut = picked
        if cut.gain_bits - min_gain_bits <= GAIN_TOL:
            break
        i = leaves.index(leaf)
        leaves[i:i + 1] = list(leaf.split(cut))
        del cache[leaf]
        steps.append(CutStep(step, leaf, cut))
        mi += cut.gain_bits
        cumulative.append(mi)

    return DissectionResult(img.width, img.height, steps, leaves, cumulative, global_entropy(img))
