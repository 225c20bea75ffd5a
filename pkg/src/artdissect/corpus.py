"""Manifest-driven batch analysis and corpus-level aggregates."""
from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .composition import (DETERMINATE_PAIRS, CompositionRecord, DissectionPair, GainProfile,
                          describe)
from .dissection import Cut, Direction, DissectionResult, dissect
from .errors import (AllItemsFailed, ArtDissectError, BadBoundaries, BadParameter, BadYear,
                     DuplicateId, EmptyGenre, EmptyManifest, MalformedRecords, SchemaError)
from .ingest import DEFAULT_BINS, DEFAULT_MAX_DIM, load_quantized

MANIFEST_COLUMNS = ("painting_id", "file_path", "artist", "year", "nationality", "style", "genre")
GENRES = ("landscape", "abstract", "other")
QUANTILES = (0.05, 0.25, 0.50, 0.75, 0.95)
DEFAULT_BIN_WIDTH_YEARS = 20


@dataclass(frozen=True)
class PaintingMeta:
    painting_id: str
    file_path: str
    artist: str = ""
    year: int | None = None
    nationality: str = ""
    style: str = ""
    genre: str = "landscape"


@dataclass(frozen=True)
class AnalysisParams:
    bins_per_channel: int = DEFAULT_BINS
    max_dim: int = DEFAULT_MAX_DIM
    max_cuts: int = 2
    min_gain_bits: float = 0.0
    min_leaf_px: int = 1

    def __post_init__(self):
        if not 2 <= self.bins_per_channel <= 16:
            raise BadParameter(f"bins_per_channel must be in [2, 16], got {self.bins_per_channel}")
        if self.max_dim < 16:
            raise BadParameter(f"max_dim must be >= 16, got {self.max_dim}")
        if self.max_cuts < 1:
            raise BadParameter(f"max_cuts must be >= 1, got {self.max_cuts}")
        if self.min_gain_bits < 0:
            raise BadParameter(f"min_gain_bits must be >= 0, got {self.min_gain_bits}")
        if self.min_leaf_px < 1:
            raise BadParameter(f"min_leaf_px must be >= 1, got {self.min_leaf_px}")


@dataclass(frozen=True)
class CorpusRecord:
    meta: PaintingMeta
    composition: CompositionRecord
    entropy_bits: float
    cuts: list[Cut] = field(default_factory=list)
    width: int = 0
    height: int = 0
    timing: float = 0.0

    @property
    def r_c(self) -> float | None:
        return self.composition.r_c

    @property
    def pair(self) -> DissectionPair:
        return self.composition.pair

    @property
    def first_gain(self) -> float:
        """H(C)-normalized gain of the first cut (0 when no cut was made)."""
        norm = self.composition.gain_profile.normalized
        return norm[0] if norm else 0.0


@dataclass(frozen=True)
class Reject:
    painting_id: str
    file_path: str
    error: str
    message: str


# ---------------------------------------------------------------------------
# manifest

def _parse_year(raw: str, pid: str) -> int | None:
    raw = raw.strip()
    if not raw:
        return None
    try:
        year = int(raw)
    except ValueError:
        raise BadYear(f"{pid}: year {raw!r} is not an integer") from None
    if not 1000 <= year <= 2100:
        raise BadYear(f"{pid}: year {year} outside [1000, 2100]")
    return year


def load_manifest(path) -> list[PaintingMeta]:
    """Read and validate a manifest. Relative file paths resolve against the
    manifest's directory."""
    path = Path(path)
    base = path.parent
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = [h.strip() for h in (reader.fieldnames or [])]
        missing = [c for c in MANIFEST_COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"manifest missing column(s): {', '.join(missing)}")
        reader.fieldnames = header
        rows = list(reader)

    seen = set()
    out = []
    for line, row in enumerate(rows, start=2):
        pid = (row["painting_id"] or "").strip()
        if not pid:
            raise SchemaError(f"line {line}: empty painting_id")
        if pid in seen:
            raise DuplicateId(f"duplicate painting_id {pid!r}")
        seen.add(pid)
        fp = (row["file_path"] or "").strip()
        if not fp:
            raise SchemaError(f"line {line}: empty file_path")
        genre = (row["genre"] or "").strip().lower() or "other"
        if genre not in GENRES:
            raise SchemaError(f"line {line}: genre {genre!r} not one of {GENRES}")
        fpath = Path(fp)
        if not fpath.is_absolute():
            fpath = base / fpath
        out.append(PaintingMeta(
            painting_id=pid,
            file_path=str(fpath),
            artist=(row["artist"] or "").strip(),
            year=_parse_year(row["year"] or "", pid),
            nationality=(row["nationality"] or "").strip(),
            style=(row["style"] or "").strip(),
            genre=genre,
        ))
    return out


def write_manifest(metas, path, relative_to=None) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(MANIFEST_COLUMNS)
        for m in metas:
            fp = m.file_path
            if relative_to is not None:
                try:
                    fp = str(Path(fp).relative_to(relative_to))
                except ValueError:
                    pass
            w.writerow([m.painting_id, fp, m.artist, "" if m.year is None else m.year,
                        m.nationality, m.style, m.genre])
    return path


# ---------------------------------------------------------------------------
# analysis

def analyze_image(path, params: AnalysisParams = AnalysisParams()) -> tuple[DissectionResult, CompositionRecord]:
    img = load_quantized(path, params.bins_per_channel, params.max_dim)
    result = dissect(img, params.max_cuts, params.min_gain_bits, params.min_leaf_px)
    return result, describe(result)


def _analyze_one(meta: PaintingMeta, params: AnalysisParams):
    t0 = time.perf_counter()
    try:
        result, comp = analyze_image(meta.file_path, params)
    except ArtDissectError as exc:
        return Reject(meta.painting_id, meta.file_path, exc.code, str(exc))
    comp = CompositionRecord(meta.painting_id, comp.pair, comp.r_c, comp.gain_profile,
                             comp.first_cut_direction)
    return CorpusRecord(meta, comp, result.entropy_bits, [s.cut for s in result.cuts],
                        result.width, result.height, time.perf_counter() - t0)


def _analyze_star(args):
    return _analyze_one(*args)


def analyze_corpus(manifest, params: AnalysisParams = AnalysisParams(),
                   workers: int = 1) -> tuple[list[CorpusRecord], list[Reject]]:
    """Dissect every manifest item. Output order follows the manifest.

    Decode failures land in the rejects list; raises ``AllItemsFailed`` only
    when nothing could be analyzed.
    """
    manifest = list(manifest)
    if not manifest:
        raise EmptyManifest("manifest has no rows")
    jobs = [(m, params) for m in manifest]
    if workers <= 1:
        outcomes = [_analyze_star(j) for j in jobs]
    else:
        chunk = max(1, len(jobs) // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_analyze_star, jobs, chunksize=chunk))
    records = [o for o in outcomes if isinstance(o, CorpusRecord)]
    rejects = [o for o in outcomes if isinstance(o, Reject)]
    if not records:
        raise AllItemsFailed(f"all {len(rejects)} items failed; first: {rejects[0].error}")
    return records, rejects


# ---------------------------------------------------------------------------
# serialization

def fmt_num(x):
    """Round floats to 12 significant digits for stable text output."""
    if isinstance(x, float):
        if not math.isfinite(x):
            return None
        return float(f"{x:.12g}")
    if isinstance(x, dict):
        return {k: fmt_num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [fmt_num(v) for v in x]
    return x


def record_to_dict(rec: CorpusRecord) -> dict:
    comp = rec.composition
    d = asdict(rec.meta)
    d.update(
        width=rec.width,
        height=rec.height,
        entropy_bits=rec.entropy_bits,
        pair=comp.pair.value,
        r_c=comp.r_c,
        first_cut_direction=None if comp.first_cut_direction is None else comp.first_cut_direction.value,
        gains_bits=list(comp.gain_profile.gains_bits),
        normalized_gains=list(comp.gain_profile.normalized),
        cuts=[{"step": i, "direction": c.direction.value, "offset": c.offset, "gain_bits": c.gain_bits}
              for i, c in enumerate(rec.cuts, start=1)],
    )
    return fmt_num(d)


def record_from_dict(d: dict) -> CorpusRecord:
    try:
        meta = PaintingMeta(**{k: d[k] for k in ("painting_id", "file_path", "artist", "year",
                                                  "nationality", "style", "genre")})
        cuts = [Cut(Direction(c["direction"]), int(c["offset"]), float(c["gain_bits"]))
                for c in sorted(d["cuts"], key=lambda c: c["step"])]
        first = d["first_cut_direction"]
        profile = GainProfile([float(g) for g in d["gains_bits"]], float(d["entropy_bits"]),
                              [float(g) for g in d["normalized_gains"]])
        comp = CompositionRecord(meta.painting_id, DissectionPair(d["pair"]),
                                 None if d["r_c"] is None else float(d["r_c"]), profile,
                                 None if first is None else Direction(first))
        return CorpusRecord(meta, comp, float(d["entropy_bits"]), cuts,
                            int(d["width"]), int(d["height"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedRecords(f"bad record {d.get('painting_id', '?') if isinstance(d, dict) else d!r}: {exc}") from exc


def dump_records(records, path) -> Path:
    path = Path(path)
    text = json.dumps([record_to_dict(r) for r in records], indent=1, ensure_ascii=False)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def load_records(path) -> list[CorpusRecord]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedRecords(f"{path}: {exc}") from exc
    if not isinstance(data, list):
        raise MalformedRecords(f"{path}: expected a JSON array of records")
    return [record_from_dict(d) for d in data]


def dump_rejects(rejects, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps([asdict(r) for r in rejects], indent=1) + "\n", encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# aggregates

@dataclass
class RcStats:
    n: int
    mean: float | None = None
    std: float | None = None
    quantiles: dict[float, float] | None = None

    @classmethod
    def of(cls, values) -> "RcStats":
        v = np.asarray(list(values), dtype=np.float64)
        if v.size == 0:
            return cls(0)
        qs = np.quantile(v, QUANTILES)
        return cls(int(v.size), float(v.mean()), float(v.std()),
                   {q: float(x) for q, x in zip(QUANTILES, qs)})


@dataclass
class TimeSeries:
    bin_start: int
    bin_width: int
    counts: dict[DissectionPair, int]
    ratios: dict[DissectionPair, float] | None
    rc: RcStats

    @property
    def n(self) -> int:
        return sum(self.counts.values())


@dataclass
class PeriodStats:
    start: int
    end: int
    rc: RcStats


@dataclass
class ExclusionTally:
    total: int
    undated: int
    underdetermined: int
    horizontal_first: int

    @property
    def horizontal_first_fraction(self) -> float:
        return self.horizontal_first / self.total if self.total else 0.0


def exclusion_tally(records) -> ExclusionTally:
    records = list(records)
    return ExclusionTally(
        total=len(records),
        undated=sum(r.meta.year is None for r in records),
        underdetermined=sum(not r.pair.determinate for r in records),
        horizontal_first=sum(r.composition.first_cut_direction is Direction.HORIZONTAL for r in records),
    )


def pair_ratio_series(records, bin_width_years: int = DEFAULT_BIN_WIDTH_YEARS) -> list[TimeSeries]:
    """Per-time-bin pair counts/ratios and r_c statistics.

    Bins run contiguously from the earliest to the latest occupied bin,
    ``bin_start = floor(year / width) * width``. Pair counts use dated,
    determinate records; r_c statistics use dated records with r_c present.
    """
    if bin_width_years < 1:
        raise BadParameter(f"bin_width_years must be >= 1, got {bin_width_years}")
    w = int(bin_width_years)
    dated = [r for r in records if r.meta.year is not None]
    if not dated:
        return []
    starts = sorted({(r.meta.year // w) * w for r in dated})
    out = []
    for start in range(starts[0], starts[-1] + w, w):
        in_bin = [r for r in dated if (r.meta.year // w) * w == start]
        counts = {p: sum(r.pair is p for r in in_bin) for p in DETERMINATE_PAIRS}
        n = sum(counts.values())
        ratios = {p: c / n for p, c in counts.items()} if n else None
        rc = RcStats.of(r.r_c for r in in_bin if r.r_c is not None)
        out.append(TimeSeries(start, w, counts, ratios, rc))
    return out


def rc_period_stats(records, period_boundaries) -> list[PeriodStats]:
    """r_c statistics per period [b_i, b_{i+1})."""
    b = [int(x) for x in period_boundaries]
    if len(b) < 2 or any(y <= x for x, y in zip(b, b[1:])):
        raise BadBoundaries(f"need >= 2 strictly increasing boundaries, got {b}")
    out = []
    for lo, hi in zip(b, b[1:]):
        vals = [r.r_c for r in records
                if r.r_c is not None and r.meta.year is not None and lo <= r.meta.year < hi]
        out.append(PeriodStats(lo, hi, RcStats.of(vals)))
    return out


@dataclass
class GenreSummary:
    n: int
    mean_first_gain: float
    horizontal_first_fraction: float


@dataclass
class ContrastReport:
    landscape: GenreSummary
    abstract: GenreSummary

    @property
    def gain_ratio(self) -> float:
        if self.abstract.mean_first_gain == 0:
            return math.inf
        return self.landscape.mean_first_gain / self.abstract.mean_first_gain


def _genre_summary(records) -> GenreSummary:
    cut = [r for r in records if r.composition.first_cut_direction is not None]
    horiz = sum(r.composition.first_cut_direction is Direction.HORIZONTAL for r in cut)
    return GenreSummary(
        n=len(records),
        mean_first_gain=float(np.mean([r.first_gain for r in records])),
        horizontal_first_fraction=horiz / len(cut) if cut else 0.0,
    )


def genre_contrast(landscape_records, abstract_records) -> ContrastReport:
    """Mean normalized first-cut gain and horizontal-first share per genre."""
    landscape_records = list(landscape_records)
    abstract_records = list(abstract_records)
    if not landscape_records or not abstract_records:
        raise EmptyGenre("both genres need at least one record")
    return ContrastReport(_genre_summary(landscape_records), _genre_summary(abstract_records))


# ---------------------------------------------------------------------------
# tables

def _q_cols():
    return [f"rc_q{int(round(q * 100)):02d}" for q in QUANTILES]


def _rc_cells(rc: RcStats):
    if rc.n == 0:
        return [0, "", ""] + [""] * len(QUANTILES)
    return [rc.n, fmt_num(rc.mean), fmt_num(rc.std)] + [fmt_num(rc.quantiles[q]) for q in QUANTILES]


def write_series_table(series, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bin_start", "bin_width", "n"]
                   + [f"count_{p.value}" for p in DETERMINATE_PAIRS]
                   + [f"ratio_{p.value}" for p in DETERMINATE_PAIRS]
                   + ["rc_n", "rc_mean", "rc_std"] + _q_cols())
        for ts in series:
            ratios = [fmt_num(ts.ratios[p]) if ts.ratios else "" for p in DETERMINATE_PAIRS]
            w.writerow([ts.bin_start, ts.bin_width, ts.n]
                       + [ts.counts[p] for p in DETERMINATE_PAIRS] + ratios + _rc_cells(ts.rc))
    return path


def write_period_table(periods, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["period_start", "period_end", "rc_n", "rc_mean", "rc_std"] + _q_cols())
        for p in periods:
            w.writerow([p.start, p.end] + _rc_cells(p.rc))
    return path
