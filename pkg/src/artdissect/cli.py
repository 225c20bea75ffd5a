"""Command-line frontend: ``dissect``, ``batch``, ``aggregate``, ``network``, ``synth``.

Results go to stdout (single image) or to files under ``--out``; fatal errors
are printed to stderr as one JSON line ``{"error": <code>, "message": ...}``
with exit status 1.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import corpus, simnet, synth
from .composition import describe
from .corpus import AnalysisParams, fmt_num
from .dissection import dissect
from .errors import ArtDissectError, BadParameter
from .ingest import DEFAULT_BINS, DEFAULT_MAX_DIM, load_quantized

DEFAULT_PERIODS = (1500, 1600, 1850, 2001)


@dataclass
class RunConfig:
    subcommand: str
    inputs: list[str]
    params: dict = field(default_factory=dict)
    out: Path | None = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        skip = {"command", "func", "input", "out"}
        params = {k: v for k, v in vars(args).items() if k not in skip}
        inputs = [args.input] if getattr(args, "input", None) else []
        out = Path(args.out) if getattr(args, "out", None) else None
        cfg = cls(args.command, inputs, params, out)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        p = self.params
        if "workers" in p and p["workers"] < 1:
            raise BadParameter("--workers must be >= 1")
        if "bin_width_years" in p and p["bin_width_years"] < 1:
            raise BadParameter("--bin-width-years must be >= 1")
        if "rc_bins" in p and p["rc_bins"] < 1:
            raise BadParameter("--rc-bins must be >= 1")
        if "min_samples" in p and p["min_samples"] < 1:
            raise BadParameter("--min-samples must be >= 1")
        t = p.get("prune_threshold")
        if t is not None and not 0 <= t <= 1:
            raise BadParameter("--prune-threshold must be in [0, 1]")

    def analysis_params(self) -> AnalysisParams:
        p = self.params
        return AnalysisParams(p["bins_per_channel"], p["max_dim"], p["max_cuts"],
                              p["min_gain_bits"], p["min_leaf_px"])


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(fmt_num(obj), indent=1) + "\n")


def _out_dir(cfg: RunConfig) -> Path:
    out = cfg.out or Path(".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_dissect(cfg: RunConfig) -> int:
    ap = cfg.analysis_params()
    img = load_quantized(cfg.inputs[0], ap.bins_per_channel, ap.max_dim)
    result = dissect(img, ap.max_cuts, ap.min_gain_bits, ap.min_leaf_px)
    comp = describe(result, Path(cfg.inputs[0]).stem)
    _emit({
        "image": cfg.inputs[0],
        "width": result.width,
        "height": result.height,
        "entropy_bits": result.entropy_bits,
        "pair": comp.pair.value,
        "r_c": comp.r_c,
        "first_cut_direction": None if comp.first_cut_direction is None else comp.first_cut_direction.value,
        "cuts": [{"step": s.step, "direction": s.cut.direction.value, "offset": s.cut.offset,
                  "gain_bits": s.cut.gain_bits, "parent": list(s.parent)} for s in result.cuts],
        "cumulative_mi_bits": result.cumulative_mi_bits,
        "gain_profile": {"gains_bits": comp.gain_profile.gains_bits,
                         "normalized": comp.gain_profile.normalized},
        "leaves": [list(r) for r in result.leaves],
    })
    return 0


def cmd_batch(cfg: RunConfig) -> int:
    manifest = corpus.load_manifest(cfg.inputs[0])
    records, rejects = corpus.analyze_corpus(manifest, cfg.analysis_params(), cfg.params["workers"])
    out = _out_dir(cfg)
    corpus.dump_records(records, out / "records.json")
    corpus.dump_rejects(rejects, out / "rejects.json")
    with open(out / "timings.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["painting_id", "seconds"])
        for r in records:
            w.writerow([r.meta.painting_id, f"{r.timing:.6f}"])
    for rj in rejects:
        sys.stderr.write(json.dumps({"reject": rj.painting_id, "error": rj.error, "message": rj.message}) + "\n")
    _emit({"records": len(records), "rejects": len(rejects), "out": str(out)})
    return 0


def cmd_aggregate(cfg: RunConfig) -> int:
    records = corpus.load_records(cfg.inputs[0])
    out = _out_dir(cfg)
    series = corpus.pair_ratio_series(records, cfg.params["bin_width_years"])
    periods = corpus.rc_period_stats(records, cfg.params["periods"])
    corpus.write_series_table(series, out / "pair_series.csv")
    corpus.write_period_table(periods, out / "rc_periods.csv")
    tally = corpus.exclusion_tally(records)
    summary = {"records": tally.total, "undated": tally.undated,
               "underdetermined": tally.underdetermined,
               "horizontal_first": tally.horizontal_first,
               "horizontal_first_fraction": tally.horizontal_first_fraction,
               "bins": len(series), "periods": len(periods)}
    (out / "exclusions.json").write_text(json.dumps(fmt_num(summary), indent=1) + "\n")
    _emit(summary)
    return 0


def cmd_network(cfg: RunConfig) -> int:
    p = cfg.params
    records = corpus.load_records(cfg.inputs[0])
    full = simnet.build_network(records, p["rc_bins"], p["min_samples"], p["metric"])
    threshold = p["prune_threshold"]
    if threshold is None:
        threshold = simnet.default_threshold(full)
    graph = simnet.prune(full, threshold)
    part = simnet.detect_communities(graph)
    out = _out_dir(cfg)
    simnet.write_edge_list(graph, out / "edges.csv")
    simnet.write_node_table(graph, part, out / "nodes.csv",
                            {"prune_threshold": threshold, "metric": p["metric"], "rc_bins": p["rc_bins"]})
    _emit({"nodes": len(graph.nodes), "edges": len(graph.edges), "communities": part.n_communities,
           "modularity": part.modularity, "prune_threshold": threshold})
    return 0


PRESETS = {
    "temporal-shift": lambda seed: synth.temporal_shift_corpus(seed=seed),
    "artist-groups": lambda seed: synth.artist_group_corpus(seed=seed)[0],
}


def cmd_synth(cfg: RunConfig) -> int:
    p = cfg.params
    seed = p["seed"]
    if p["preset"]:
        items = PRESETS[p["preset"]](seed or 0)
    elif cfg.inputs:
        items = synth.load_corpus_spec(cfg.inputs[0])
    else:
        raise BadParameter("synth needs a spec file or --preset")
    manifest, metas = synth.generate_corpus(items, _out_dir(cfg), base_seed=seed)
    _emit({"images": len(metas), "manifest": str(manifest)})
    return 0


def _add_analysis_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bins-per-channel", type=int, default=DEFAULT_BINS,
                   help="uniform color bins per RGB channel, 2-16 (default %(default)s)")
    p.add_argument("--max-dim", type=int, default=DEFAULT_MAX_DIM,
                   help="downscale so the longer side is at most this, >= 16 (default %(default)s)")
    p.add_argument("--max-cuts", type=int, default=2, help="maximum number of cuts (default %(default)s)")
    p.add_argument("--min-gain-bits", type=float, default=0.0,
                   help="stop when no cut gains more than this (default %(default)s)")
    p.add_argument("--min-leaf-px", type=int, default=1,
                   help="minimum leaf thickness along the cut axis (default %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="artdissect", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dissect", help="dissect one image, print JSON to stdout")
    p.add_argument("input", help="image file (PNG/JPEG/BMP)")
    _add_analysis_flags(p)
    p.set_defaults(func=cmd_dissect)

    p = sub.add_parser("batch", help="dissect every image in a manifest")
    p.add_argument("input", help="manifest CSV")
    _add_analysis_flags(p)
    p.add_argument("--workers", type=int, default=1, help="worker processes (default %(default)s)")
    p.add_argument("--out", default="out", help="output directory (default %(default)s)")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("aggregate", help="pair-ratio time series and r_c period tables")
    p.add_argument("input", help="records.json from batch")
    p.add_argument("--bin-width-years", type=int, default=corpus.DEFAULT_BIN_WIDTH_YEARS,
                   help="time bin width in years (default %(default)s)")
    p.add_argument("--periods", type=lambda s: [int(x) for x in s.split(",")], default=list(DEFAULT_PERIODS),
                   help="comma-separated period boundaries (default 1500,1600,1850,2001)")
    p.add_argument("--out", default="out", help="output directory (default %(default)s)")
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("network", help="artist similarity network and communities")
    p.add_argument("input", help="records.json from batch")
    p.add_argument("--rc-bins", type=int, default=simnet.DEFAULT_RC_BINS,
                   help="r_c histogram bins on [0, 1] (default %(default)s)")
    p.add_argument("--prune-threshold", type=float, default=None,
                   help="keep edges with weight >= this (default: 75th-percentile weight)")
    p.add_argument("--min-samples", type=int, default=simnet.DEFAULT_MIN_SAMPLES,
                   help="minimum r_c values per artist (default %(default)s)")
    p.add_argument("--metric", choices=sorted(simnet.METRICS), default="jsd",
                   help="similarity metric (default %(default)s)")
    p.add_argument("--out", default="out", help="output directory (default %(default)s)")
    p.set_defaults(func=cmd_network)

    p = sub.add_parser("synth", help="generate a synthetic corpus and manifest")
    p.add_argument("input", nargs="?", help="corpus spec JSON file")
    p.add_argument("--preset", choices=sorted(PRESETS), default=None, help="built-in corpus instead of a spec file")
    p.add_argument("--seed", type=int, default=None, help="base seed; item i uses seed XOR i")
    p.add_argument("--out", default="out", help="output directory (default %(default)s)")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.from_args(args)
        return args.func(cfg)
    except ArtDissectError as exc:
        sys.stderr.write(json.dumps({"error": exc.code, "message": str(exc)}) + "\n")
        return 1
    except OSError as exc:
        sys.stderr.write(json.dumps({"error": "IoError", "message": str(exc)}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
