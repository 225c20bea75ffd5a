import itertools

import numpy as np
import pytest

from artdissect.dissection import Cut, Direction
from artdissect.ingest import QuantizedImage


def qimg(indices, bins=8):
    return QuantizedImage.from_indices(np.asarray(indices), bins)


def random_qimage(rng, h, w, n_colors, bins=8):
    palette = rng.choice(bins ** 3, size=n_colors, replace=False)
    return qimg(palette[rng.integers(0, n_colors, size=(h, w))], bins)


# --- oracles: joint-distribution MI on a region label map, no library code ---

def oracle_mi(indices, regions):
    """I(R;C) from the joint table of (region label, color) over all pixels."""
    indices = np.asarray(indices)
    labels = np.full(indices.shape, -1)
    for i, (x0, y0, x1, y1) in enumerate(regions):
        assert (labels[y0:y1, x0:x1] == -1).all()
        labels[y0:y1, x0:x1] = i
    assert (labels >= 0).all()
    n = indices.size
    joint = {}
    for r, c in zip(labels.ravel().tolist(), indices.ravel().tolist()):
        joint[(r, c)] = joint.get((r, c), 0) + 1
    pr, pc = {}, {}
    for (r, c), k in joint.items():
        pr[r] = pr.get(r, 0) + k
        pc[c] = pc.get(c, 0) + k
    mi = 0.0
    for (r, c), k in joint.items():
        mi += k / n * np.log2(k * n / (pr[r] * pc[c]))
    return mi


def oracle_entropy(indices):
    _, counts = np.unique(np.asarray(indices), return_counts=True)
    p = counts / counts.sum()
    return float(-(p * np.log2(p)).sum())


def split_region(r, direction, k):
    x0, y0, x1, y1 = r
    if direction is Direction.HORIZONTAL:
        return (x0, y0, x1, k), (x0, k, x1, y1)
    return (x0, y0, k, y1), (k, y0, x1, y1)


def oracle_all_cuts(indices, leaves, leaf):
    """Every interior cut of ``leaf`` with its MI gain from direct evaluation."""
    before = oracle_mi(indices, leaves)
    others = [l for l in leaves if tuple(l) != tuple(leaf)]
    x0, y0, x1, y1 = leaf
    out = []
    for direction, (lo, hi) in ((Direction.HORIZONTAL, (y0, y1)), (Direction.VERTICAL, (x0, x1))):
        for k in range(lo + 1, hi):
            after = oracle_mi(indices, others + list(split_region(leaf, direction, k)))
            out.append((direction, k, after - before))
    return out


def oracle_best_cut(indices, leaves, leaf, tol=1e-12):
    cands = oracle_all_cuts(indices, leaves, leaf)
    g = max(c[2] for c in cands)
    tied = [c for c in cands if c[2] >= g - tol]
    d, k, gain = min(tied, key=lambda c: (c[0] is Direction.VERTICAL, c[1]))
    return Cut(d, k, gain), len(tied)


def oracle_modularity(nodes, edges, assignment):
    """Newman weighted modularity from the full adjacency matrix."""
    idx = {n: i for i, n in enumerate(nodes)}
    A = np.zeros((len(nodes), len(nodes)))
    for (a, b), w in edges.items():
        A[idx[a], idx[b]] += w
        A[idx[b], idx[a]] += w
    two_m = A.sum()
    if two_m == 0:
        return 0.0
    k = A.sum(axis=1)
    q = 0.0
    for i, j in itertools.product(range(len(nodes)), repeat=2):
        if assignment[nodes[i]] == assignment[nodes[j]]:
            q += A[i, j] - k[i] * k[j] / two_m
    return q / two_m


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# --- acceptance reporting: one line per criterion in the terminal summary ---

_criteria = []


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    props = dict(report.user_properties)
    if "criterion" in props:
        _criteria.append((props["criterion"], report.outcome, props.get("detail", "")))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, detail in sorted(_criteria):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}  {detail}".rstrip())
