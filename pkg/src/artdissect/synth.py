"""Deterministic synthetic paintings with known composition.

Randomness comes from one documented source: the raw 64-bit output of the
Philox4x64-10 counter-based generator (``numpy.random.Philox`` keyed by the
item seed, counter starting at zero). Uniforms are ``((w >> 11) + 0.5) / 2**53``
and Gaussian jitter uses the Box-Muller transform on consecutive uniform pairs.
Changing this scheme changes every generated corpus, so it is part of the
versioned interface.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image

from .corpus import PaintingMeta, write_manifest
from .errors import BadSpec, IoError
from .ingest import RawImage, palette_color

Color = tuple[int, int, int]
MASK64 = (1 << 64) - 1


class DeterministicStream:
    """Philox4x64-10 raw words turned into uniforms and normals."""

    def __init__(self, seed: int):
        self._bg = np.random.Philox(key=int(seed) & MASK64)

    def raw(self, n: int) -> np.ndarray:
        return self._bg.random_raw(n).astype(np.uint64)

    def uniform(self, n: int) -> np.ndarray:
        return ((self.raw(n) >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53

    def normal(self, n: int) -> np.ndarray:
        m = (n + 1) // 2
        u = self.uniform(2 * m)
        rad = np.sqrt(-2.0 * np.log(u[0::2]))
        ang = 2.0 * np.pi * u[1::2]
        return np.concatenate([rad * np.cos(ang), rad * np.sin(ang)])[:n]

    def integers(self, n: int, high: int) -> np.ndarray:
        return (self.raw(n) % np.uint64(high)).astype(np.int64)


# ---------------------------------------------------------------------------
# layouts

@dataclass(frozen=True)
class HorizontalBands:
    bands: tuple[tuple[float, Color], ...]


@dataclass(frozen=True)
class VerticalBands:
    bands: tuple[tuple[float, Color], ...]


@dataclass(frozen=True)
class Rect:
    """Rectangle in canvas fractions: [fx0, fx1) x [fy0, fy1)."""
    fx0: float
    fy0: float
    fx1: float
    fy1: float
    color: Color


@dataclass(frozen=True)
class BandsWithRect:
    base: Union[HorizontalBands, VerticalBands]
    rects: tuple[Rect, ...]


@dataclass(frozen=True)
class Noise:
    palette_size: int = 512


Layout = Union[HorizontalBands, VerticalBands, BandsWithRect, Noise]


@dataclass(frozen=True)
class SynthSpec:
    width: int
    height: int
    layout: Layout
    noise_sigma: float = 0.0
    seed: int = 0

    def validate(self) -> None:
        if self.width < 1 or self.height < 1:
            raise BadSpec(f"canvas must be at least 1x1, got {self.width}x{self.height}")
        if not 0 <= self.noise_sigma <= 64:
            raise BadSpec(f"noise_sigma must be in [0, 64], got {self.noise_sigma}")
        _validate_layout(self.layout)


def _check_color(c) -> None:
    if len(c) != 3 or any(not 0 <= int(v) <= 255 for v in c):
        raise BadSpec(f"bad color {c!r}")


def _validate_layout(layout) -> None:
    if isinstance(layout, (HorizontalBands, VerticalBands)):
        if not layout.bands:
            raise BadSpec("band list is empty")
        fr = [f for f, _ in layout.bands]
        if any(f <= 0 for f in fr):
            raise BadSpec("band fractions must be positive")
        if abs(sum(fr) - 1.0) > 1e-6:
            raise BadSpec(f"band fractions sum to {sum(fr)}, not 1")
        for _, c in layout.bands:
            _check_color(c)
    elif isinstance(layout, BandsWithRect):
        if not isinstance(layout.base, (HorizontalBands, VerticalBands)):
            raise BadSpec("BandsWithRect base must be a band layout")
        _validate_layout(layout.base)
        for r in layout.rects:
            if not (0 <= r.fx0 < r.fx1 <= 1 and 0 <= r.fy0 < r.fy1 <= 1):
                raise BadSpec(f"rectangle {r} not inside canvas")
            _check_color(r.color)
    elif isinstance(layout, Noise):
        if not 1 <= layout.palette_size <= 512:
            raise BadSpec(f"palette_size must be in [1, 512], got {layout.palette_size}")
    else:
        raise BadSpec(f"unknown layout {layout!r}")


def _px(frac: float, dim: int) -> int:
    return int(math.floor(frac * dim + 0.5))


def band_offsets(fractions, dim: int) -> list[int]:
    """Band boundaries at round(cumulative fraction * dim); last is dim."""
    out, acc = [], 0.0
    for f in fractions[:-1]:
        acc += f
        out.append(_px(acc, dim))
    return out + [dim]


def _paint_bands(canvas: np.ndarray, layout) -> None:
    horizontal = isinstance(layout, HorizontalBands)
    dim = canvas.shape[0] if horizontal else canvas.shape[1]
    start = 0
    for (_, color), stop in zip(layout.bands, band_offsets([f for f, _ in layout.bands], dim)):
        if horizontal:
            canvas[start:stop, :] = color
        else:
            canvas[:, start:stop] = color
        start = stop


def noise_palette(palette_size: int) -> np.ndarray:
    """``palette_size`` distinct colors spread over the 8-bin-per-channel grid."""
    return np.array([palette_color(j * 512 // palette_size, 8) for j in range(palette_size)],
                    dtype=np.uint8)


def generate(spec: SynthSpec) -> RawImage:
    spec.validate()
    h, w = spec.height, spec.width
    stream = DeterministicStream(spec.seed)
    canvas = np.zeros((h, w, 3), dtype=np.uint8)
    layout = spec.layout
    if isinstance(layout, Noise):
        canvas[:] = noise_palette(layout.palette_size)[stream.integers(h * w, layout.palette_size)].reshape(h, w, 3)
    elif isinstance(layout, BandsWithRect):
        _paint_bands(canvas, layout.base)
        for r in layout.rects:
            canvas[_px(r.fy0, h):_px(r.fy1, h), _px(r.fx0, w):_px(r.fx1, w)] = r.color
    else:
        _paint_bands(canvas, layout)
    if spec.noise_sigma > 0:
        jitter = stream.normal(h * w * 3).reshape(h, w, 3) * spec.noise_sigma
        canvas = np.clip(np.rint(canvas.astype(np.float64) + jitter), 0, 255).astype(np.uint8)
    return RawImage(canvas)


def save_png(img: RawImage, path) -> Path:
    path = Path(path)
    try:
        Image.fromarray(np.asarray(img.pixels)).save(path, format="PNG")
    except OSError as exc:
        raise IoError(f"{path}: {exc}") from exc
    return path


def generate_corpus(items, out_dir, base_seed: int | None = None) -> tuple[Path, list[PaintingMeta]]:
    """Write one PNG per (meta template, spec) pair plus ``manifest.csv``.

    With ``base_seed`` each item's seed becomes ``base_seed XOR index``.
    """
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"{out_dir}: {exc}") from exc
    metas = []
    for i, (meta, spec) in enumerate(items):
        if base_seed is not None:
            spec = replace(spec, seed=(int(base_seed) ^ i) & MASK64)
        fname = meta.file_path or f"{meta.painting_id}.png"
        path = save_png(generate(spec), out_dir / fname)
        metas.append(replace(meta, file_path=str(path)))
    try:
        manifest = write_manifest(metas, out_dir / "manifest.csv", relative_to=out_dir)
    except OSError as exc:
        raise IoError(f"{out_dir}: {exc}") from exc
    return manifest, metas


# ---------------------------------------------------------------------------
# spec file (JSON) codec

def _color(v) -> Color:
    try:
        c = tuple(int(x) for x in v)
    except (TypeError, ValueError):
        raise BadSpec(f"bad color {v!r}") from None
    _check_color(c)
    return c


def _bands(v):
    try:
        return tuple((float(f), _color(c)) for f, c in v)
    except (TypeError, ValueError):
        raise BadSpec(f"bad band list {v!r}") from None


def layout_from_dict(d: dict) -> Layout:
    kind = d.get("type")
    if kind == "horizontal_bands":
        return HorizontalBands(_bands(d["bands"]))
    if kind == "vertical_bands":
        return VerticalBands(_bands(d["bands"]))
    if kind == "bands_with_rect":
        rects = d.get("rects")
        if rects is None:
            rects = [{"rect": d["rect"], "color": d["color"]}]
        base = layout_from_dict(d["base"])
        return BandsWithRect(base, tuple(Rect(*map(float, r["rect"]), _color(r["color"])) for r in rects))
    if kind == "noise":
        return Noise(int(d.get("palette_size", 512)))
    raise BadSpec(f"unknown layout type {kind!r}")


def layout_to_dict(layout: Layout) -> dict:
    if isinstance(layout, HorizontalBands):
        return {"type": "horizontal_bands", "bands": [[f, list(c)] for f, c in layout.bands]}
    if isinstance(layout, VerticalBands):
        return {"type": "vertical_bands", "bands": [[f, list(c)] for f, c in layout.bands]}
    if isinstance(layout, BandsWithRect):
        return {"type": "bands_with_rect", "base": layout_to_dict(layout.base),
                "rects": [{"rect": [r.fx0, r.fy0, r.fx1, r.fy1], "color": list(r.color)}
                          for r in layout.rects]}
    return {"type": "noise", "palette_size": layout.palette_size}


def spec_from_dict(d: dict) -> SynthSpec:
    try:
        spec = SynthSpec(int(d["width"]), int(d["height"]), layout_from_dict(d["layout"]),
                         float(d.get("noise_sigma", 0.0)), int(d.get("seed", 0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise BadSpec(f"bad synth spec: {exc!r}") from exc
    spec.validate()
    return spec


def spec_to_dict(spec: SynthSpec) -> dict:
    return {"width": spec.width, "height": spec.height, "layout": layout_to_dict(spec.layout),
            "noise_sigma": spec.noise_sigma, "seed": spec.seed}


def load_corpus_spec(path) -> list[tuple[PaintingMeta, SynthSpec]]:
    """Corpus spec file: JSON array of ``{"meta": {...}, "spec": {...}}``."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise IoError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise BadSpec(f"{path}: {exc}") from exc
    if not isinstance(data, list):
        raise BadSpec(f"{path}: expected a JSON array")
    items = []
    for i, entry in enumerate(data):
        try:
            m = dict(entry["meta"])
            m.setdefault("painting_id", f"p{i:05d}")
            m.setdefault("file_path", "")
            meta = PaintingMeta(**m)
        except (KeyError, TypeError) as exc:
            raise BadSpec(f"item {i}: bad meta: {exc!r}") from exc
        items.append((meta, spec_from_dict(entry["spec"])))
    return items


def dump_corpus_spec(items, path) -> Path:
    path = Path(path)
    data = [{"meta": {k: v for k, v in vars(m).items() if k != "file_path" or v}, "spec": spec_to_dict(s)}
            for m, s in items]
    path.write_text(json.dumps(data, indent=1) + "\n", encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# scene builders

SKY: Color = (80, 144, 208)
GROUND: Color = (48, 112, 48)
WATER: Color = (16, 48, 144)
BUILDING: Color = (176, 112, 80)
FIELD: Color = (208, 208, 80)
ROCK: Color = (112, 112, 112)
CLOUD: Color = (240, 240, 240)


def landscape(horizon: float, width: int = 200, height: int = 200, sky: Color = SKY,
              ground: Color = GROUND, sigma: float = 0.0, seed: int = 0) -> SynthSpec:
    """Two-band sky/ground scene; ``horizon`` is the sky's height fraction."""
    return SynthSpec(width, height, HorizontalBands(((horizon, sky), (1 - horizon, ground))), sigma, seed)


def three_band(first: float, second: float, width: int = 200, height: int = 200,
               colors=(SKY, WATER, GROUND), sigma: float = 0.0, seed: int = 0) -> SynthSpec:
    """Three horizontal bands with the given first two fractions."""
    bands = ((first, colors[0]), (second, colors[1]), (1 - first - second, colors[2]))
    return SynthSpec(width, height, HorizontalBands(bands), sigma, seed)


def object_scene(horizon: float, object_width: float, width: int = 200, height: int = 200,
                 sigma: float = 0.0, seed: int = 0) -> SynthSpec:
    """Sky over a lower band split into a foreground object (left) and a field."""
    base = HorizontalBands(((horizon, SKY), (1 - horizon, FIELD)))
    rect = Rect(0.0, horizon, object_width, 1.0, BUILDING)
    return SynthSpec(width, height, BandsWithRect(base, (rect,)), sigma, seed)


def two_column_scene(split: float, left_band: float, right_band: float, width: int = 200,
                     height: int = 200, sigma: float = 0.0, seed: int = 0) -> SynthSpec:
    """Two columns, each with its own pair of horizontal bands."""
    base = VerticalBands(((split, SKY), (1 - split, CLOUD)))
    rects = (Rect(0.0, left_band, split, 1.0, GROUND), Rect(split, right_band, 1.0, 1.0, ROCK))
    return SynthSpec(width, height, BandsWithRect(base, rects), sigma, seed)


def noise_abstract(width: int = 128, height: int = 128, palette_size: int = 512,
                   seed: int = 0) -> SynthSpec:
    return SynthSpec(width, height, Noise(palette_size), 0.0, seed)


def temporal_shift_corpus(n: int = 400, start_year: int = 1600, end_year: int = 1900,
                          shift_start: int = 1700, shift_end: int = 1800, seed: int = 0,
                          width: int = 96, height: int = 96, sigma: float = 8.0):
    """Corpus whose dominant layout moves from H-V (object) scenes to H-H
    (three band) scenes, with P(HH) rising linearly across the shift window.

    The layout draw uses a Weyl sequence (seeded start, golden-ratio step) so
    the HH share of any run of consecutive years tracks P(HH) closely.
    """
    stream = DeterministicStream(seed)
    u = stream.uniform(4 * n).reshape(n, 4)
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    items = []
    for i in range(n):
        year = start_year + (i * (end_year - start_year)) // max(1, n - 1)
        p_hh = min(1.0, max(0.0, (year - shift_start) / (shift_end - shift_start)))
        item_seed = (seed ^ i) & MASK64
        if (u[0, 3] + i * golden) % 1.0 < p_hh:
            first = 0.25 + 0.15 * u[i, 1]
            spec = three_band(first, 0.25 + 0.1 * u[i, 2], width, height, sigma=sigma, seed=item_seed)
            style = "HH-scene"
        else:
            spec = object_scene(0.3 + 0.15 * u[i, 1], 0.25 + 0.15 * u[i, 2], width, height,
                                sigma=sigma, seed=item_seed)
            style = "HV-scene"
        meta = PaintingMeta(f"t{i:04d}", f"t{i:04d}.png", f"artist{i % 40:02d}", year, "", style, "landscape")
        items.append((meta, spec))
    return items


def artist_group_corpus(centers=(0.45, 0.33, 0.20), artists_per_group: int = 10,
                        works_per_artist: int = 20, std: float = 0.03, seed: int = 0,
                        width: int = 120, height: int = 200, sigma: float = 8.0,
                        eras=((1600, 1900), (1850, 1930), (1900, 2000))):
    """Artists in groups whose horizon proportions center on ``centers``.

    Returns (items, truth) where truth maps artist -> group index.
    """
    stream = DeterministicStream(seed)
    items, truth = [], {}
    k = 0
    for g, center in enumerate(centers):
        lo, hi = eras[g % len(eras)]
        for a in range(artists_per_group):
            artist = f"g{g}a{a:02d}"
            truth[artist] = g
            rcs = np.clip(center + std * stream.normal(works_per_artist), 0.05, 0.95)
            years = lo + (stream.uniform(works_per_artist) * (hi - lo)).astype(int)
            for j in range(works_per_artist):
                pid = f"{artist}w{j:02d}"
                spec = landscape(float(rcs[j]), width, height, sigma=sigma, seed=(seed ^ k) & MASK64)
                items.append((PaintingMeta(pid, f"{pid}.png", artist, int(years[j]), "", f"group{g}",
                                           "landscape"), spec))
                k += 1
    return items, truth
