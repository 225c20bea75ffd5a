"""Artist compositional-similarity network and greedy modularity communities."""
from __future__ import annotations

import csv
import itertools
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import BinMismatch, BadParameter, IncompletePartition, TooFewArtists, TooFewSamples

DEFAULT_RC_BINS = 20
DEFAULT_MIN_SAMPLES = 5
DEFAULT_PRUNE_PERCENTILE = 75.0
MERGE_TOL = 1e-12


@dataclass(frozen=True)
class RcDistribution:
    artist: str
    histogram: np.ndarray
    n: int
    values: tuple[float, ...] = ()

    @property
    def bins(self) -> int:
        return len(self.histogram)

    @property
    def probabilities(self) -> np.ndarray:
        return self.histogram / self.n

    @property
    def mean(self) -> float:
        return float(np.mean(self.values)) if self.values else float("nan")

    @property
    def std(self) -> float:
        return float(np.std(self.values)) if self.values else float("nan")


@dataclass
class SimilarityGraph:
    nodes: list[str]
    edges: dict[tuple[str, str], float]
    payload: dict[str, RcDistribution] = field(default_factory=dict)
    meta: dict[str, dict] = field(default_factory=dict)

    def weight(self, a: str, b: str) -> float:
        return self.edges.get(_key(a, b), 0.0)

    def adjacency(self) -> np.ndarray:
        idx = {n: i for i, n in enumerate(self.nodes)}
        A = np.zeros((len(self.nodes), len(self.nodes)))
        for (a, b), w in self.edges.items():
            A[idx[a], idx[b]] = A[idx[b], idx[a]] = w
        return A


@dataclass(frozen=True)
class CommunityPartition:
    assignment: dict[str, int]
    modularity: float

    @property
    def n_communities(self) -> int:
        return len(set(self.assignment.values()))

    def groups(self) -> list[list[str]]:
        out: dict[int, list[str]] = {}
        for node, c in self.assignment.items():
            out.setdefault(c, []).append(node)
        return [sorted(out[c]) for c in sorted(out)]


def _key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


def _rc_by_artist(records) -> dict[str, list[float]]:
    out: dict[str, list[float]] = {}
    for r in records:
        if r.r_c is not None and r.meta.artist:
            out.setdefault(r.meta.artist, []).append(r.r_c)
    return out


def histogram_rc(values, bins: int = DEFAULT_RC_BINS) -> np.ndarray:
    """Bin index floor(r_c * bins); r_c < 1 always holds for a cut offset."""
    if bins < 1:
        raise BadParameter(f"bins must be >= 1, got {bins}")
    idx = np.floor(np.asarray(values, dtype=np.float64) * bins).astype(np.int64)
    return np.bincount(np.clip(idx, 0, bins - 1), minlength=bins)


def rc_distribution(records, artist: str, bins: int = DEFAULT_RC_BINS,
                    min_samples: int = DEFAULT_MIN_SAMPLES) -> RcDistribution:
    values = _rc_by_artist(records).get(artist, [])
    if len(values) < max(1, min_samples):
        raise TooFewSamples(f"{artist!r} has {len(values)} r_c values, need {min_samples}")
    return RcDistribution(artist, histogram_rc(values, bins), len(values), tuple(values))


def jensen_shannon(p: np.ndarray, q: np.ndarray) -> float:
    """JSD in bits between two probability vectors; lies in [0, 1]."""
    m = 0.5 * (p + q)

    def kl(a):
        mask = a > 0
        return float((a[mask] * np.log2(a[mask] / m[mask])).sum())

    return min(1.0, max(0.0, 0.5 * kl(p) + 0.5 * kl(q)))


def ks_statistic(p: np.ndarray, q: np.ndarray) -> float:
    """Largest gap between the binned CDFs."""
    return float(np.max(np.abs(np.cumsum(p) - np.cumsum(q))))


METRICS = {
    "jsd": lambda p, q: 1.0 - jensen_shannon(p, q),
    "ks": lambda p, q: 1.0 - ks_statistic(p, q),
}


def similarity(d1: RcDistribution, d2: RcDistribution, metric: str = "jsd") -> float:
    """Edge weight in [0, 1]; 1 - JSD by default."""
    if d1.bins != d2.bins:
        raise BinMismatch(f"{d1.bins} vs {d2.bins} bins")
    return METRICS[metric](d1.probabilities, d2.probabilities)


def build_network(records, bins: int = DEFAULT_RC_BINS, min_samples: int = DEFAULT_MIN_SAMPLES,
                  metric: str = "jsd") -> SimilarityGraph:
    """Complete weighted graph over artists with at least ``min_samples`` r_c values."""
    records = list(records)
    by_artist = _rc_by_artist(records)
    eligible = sorted(a for a, v in by_artist.items() if len(v) >= max(1, min_samples))
    if len(eligible) < 2:
        raise TooFewArtists(f"{len(eligible)} artist(s) with >= {min_samples} r_c values; need 2")
    dists = {a: rc_distribution(records, a, bins, min_samples) for a in eligible}
    edges = {}
    for a, b in itertools.combinations(eligible, 2):
        edges[(a, b)] = similarity(dists[a], dists[b], metric)
    styles: dict[str, Counter] = {}
    for r in records:
        if r.meta.artist in dists and r.meta.style:
            styles.setdefault(r.meta.artist, Counter())[r.meta.style] += 1
    meta = {a: {"style": min(styles[a].items(), key=lambda kv: (-kv[1], kv[0]))[0] if a in styles else ""}
            for a in eligible}
    return SimilarityGraph(eligible, edges, dists, meta)


def default_threshold(graph: SimilarityGraph, percentile: float = DEFAULT_PRUNE_PERCENTILE) -> float:
    if not graph.edges:
        return 0.0
    return float(np.percentile(list(graph.edges.values()), percentile))


def prune(graph: SimilarityGraph, threshold: float | None = None) -> SimilarityGraph:
    """Keep edges with weight >= threshold (default: 75th-percentile weight).
    Nodes left without edges stay in the graph."""
    if threshold is None:
        threshold = default_threshold(graph)
    if not 0.0 <= threshold <= 1.0:
        raise BadParameter(f"threshold must be in [0, 1], got {threshold}")
    edges = {k: w for k, w in graph.edges.items() if w >= threshold}
    return SimilarityGraph(list(graph.nodes), edges, graph.payload, graph.meta)


def modularity(graph: SimilarityGraph, partition) -> float:
    """Weighted modularity Q = sum_c [in_c / W - (deg_c / 2W)^2]."""
    assignment = partition.assignment if isinstance(partition, CommunityPartition) else dict(partition)
    missing = [n for n in graph.nodes if n not in assignment]
    if missing:
        raise IncompletePartition(f"nodes without a community: {missing[:5]}")
    total = sum(graph.edges.values())
    if total <= 0:
        return 0.0
    inside: dict[int, float] = {}
    degree: dict[int, float] = {}
    for (a, b), w in graph.edges.items():
        ca, cb = assignment[a], assignment[b]
        degree[ca] = degree.get(ca, 0.0) + w
        degree[cb] = degree.get(cb, 0.0) + w
        if ca == cb:
            inside[ca] = inside.get(ca, 0.0) + w
    return float(sum(inside.values()) / total
                 - sum((d / (2 * total)) ** 2 for d in degree.values()))


def detect_communities(graph: SimilarityGraph) -> CommunityPartition:
    """Greedy agglomerative modularity maximization.

    Starting from singletons, repeatedly merge the connected pair of
    communities with the largest modularity increase, stopping when no merge
    increases it. Ties (within ``MERGE_TOL``) go to the pair whose smallest
    node indices are lexicographically first. Community ids are numbered by
    first member in node order.
    """
    if not graph.nodes:
        raise BadParameter("graph has no nodes")
    n = len(graph.nodes)
    idx = {node: i for i, node in enumerate(graph.nodes)}
    W = sum(graph.edges.values())
    members = {i: [i] for i in range(n)}
    if W > 0:
        # between[c][d]: total edge weight between communities c and d
        between: dict[int, dict[int, float]] = {i: {} for i in range(n)}
        deg = np.zeros(n)
        for (a, b), w in graph.edges.items():
            i, j = idx[a], idx[b]
            if w <= 0:
                continue
            between[i][j] = between[i].get(j, 0.0) + w
            between[j][i] = between[j].get(i, 0.0) + w
            deg[i] += w
            deg[j] += w
        deg_c = {i: float(deg[i]) for i in range(n)}
        while True:
            best = None
            for c in sorted(between):
                for d in sorted(between[c]):
                    if d <= c:
                        continue
                    w = between[c][d]
                    dq = w / W - 2.0 * (deg_c[c] / (2 * W)) * (deg_c[d] / (2 * W))
                    if best is None or dq > best[0] + MERGE_TOL:
                        best = (dq, c, d)
            if best is None or best[0] <= MERGE_TOL:
                break
            _, c, d = best
            # fold d into c
            for e, w in between.pop(d).items():
                if e == c:
                    continue
                between[c][e] = between[c].get(e, 0.0) + w
                between[e].pop(d, None)
                between[e][c] = between[e].get(c, 0.0) + w
            between[c].pop(d, None)
            deg_c[c] += deg_c.pop(d)
            members[c] = sorted(members[c] + members.pop(d))
    order = sorted(members.values(), key=lambda m: m[0])
    assignment = {}
    for cid, m in enumerate(order):
        for i in m:
            assignment[graph.nodes[i]] = cid
    return CommunityPartition(assignment, modularity(graph, assignment))


# ---------------------------------------------------------------------------
# tables

def write_edge_list(graph: SimilarityGraph, path) -> Path:
    from .corpus import fmt_num
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["artist_a", "artist_b", "weight"])
        for (a, b), wt in sorted(graph.edges.items()):
            w.writerow([a, b, fmt_num(wt)])
    return path


def write_node_table(graph: SimilarityGraph, partition: CommunityPartition, path,
                     extra_meta: dict | None = None) -> Path:
    """Node table followed by ``# key,value`` footer lines (modularity, etc.)."""
    from .corpus import fmt_num
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["artist", "community", "n", "rc_mean", "rc_std", "style"])
        for node in graph.nodes:
            d = graph.payload.get(node)
            w.writerow([node, partition.assignment[node], d.n if d else 0,
                        fmt_num(d.mean) if d else "", fmt_num(d.std) if d else "",
                        graph.meta.get(node, {}).get("style", "")])
        footer = {"modularity": fmt_num(partition.modularity),
                  "communities": partition.n_communities,
                  "nodes": len(graph.nodes), "edges": len(graph.edges)}
        footer.update(extra_meta or {})
        for k, v in footer.items():
            fh.write(f"# {k},{fmt_num(v)}\n")
    return path


def read_node_table(path) -> tuple[list[dict], dict[str, str]]:
    rows, footer = [], {}
    with open(path, newline="", encoding="utf-8") as fh:
        body = []
        for line in fh:
            if line.startswith("# "):
                k, _, v = line[2:].rstrip("\n").partition(",")
                footer[k] = v
            else:
                body.append(line)
    rows = list(csv.DictReader(body))
    return rows, footer
