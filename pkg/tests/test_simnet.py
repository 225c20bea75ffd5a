import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from artdissect.errors import BinMismatch, IncompletePartition, TooFewArtists, TooFewSamples
from artdissect.simnet import (RcDistribution, SimilarityGraph, build_network, default_threshold,
                               detect_communities, histogram_rc, jensen_shannon, modularity, prune,
                               rc_distribution, read_node_table, similarity, write_edge_list,
                               write_node_table)
from artdissect.synth import DeterministicStream

from conftest import oracle_modularity, set_partitions
from test_corpus import fake


def dist(counts, artist="x"):
    counts = np.asarray(counts)
    return RcDistribution(artist, counts, int(counts.sum()))


def artist_records(artist, values):
    return [fake(f"{artist}{i}", r_c=v, artist=artist) for i, v in enumerate(values)]


def two_clique_graph(bridge=0.1):
    nodes = list("abcdefgh")
    edges = {}
    for group in ("abcd", "efgh"):
        for a, b in itertools.combinations(group, 2):
            edges[(a, b)] = 1.0
    edges[("d", "e")] = bridge
    return SimilarityGraph(nodes, edges)


# --- distributions and similarity ---

def test_rc_binning():
    d = rc_distribution(artist_records("p", [0.30, 0.34]), "p", bins=10, min_samples=1)
    assert d.histogram[3] == 2 and d.n == 2


def test_rc_too_few():
    with pytest.raises(TooFewSamples):
        rc_distribution(artist_records("p", [0.3]), "p", bins=10, min_samples=5)


def test_rc_uniform_one_bin():
    u = DeterministicStream(3).uniform(1000)
    d = rc_distribution(artist_records("p", list(0.3 + 0.1 * u)), "p", bins=10)
    assert d.histogram[3] == 1000


def test_histogram_edge_values():
    assert histogram_rc([0.0, 0.999999], 20).tolist() == [1] + [0] * 18 + [1]


def test_similarity_identical_and_disjoint():
    assert similarity(dist([1, 2, 3]), dist([2, 4, 6])) == pytest.approx(1.0, abs=1e-15)
    assert similarity(dist([1, 0, 0]), dist([0, 0, 5])) == pytest.approx(0.0, abs=1e-15)


def test_similarity_hand_computed():
    # JSD((1,0), (.5,.5)): m = (.75, .25)
    kl_p = 1.0 * np.log2(1.0 / 0.75)
    kl_q = 0.5 * np.log2(0.5 / 0.75) + 0.5 * np.log2(0.5 / 0.25)
    jsd = 0.5 * kl_p + 0.5 * kl_q
    assert jsd == pytest.approx(0.3113, abs=1e-4)
    assert similarity(dist([2, 0]), dist([1, 1])) == pytest.approx(1 - jsd, abs=1e-15)


def test_similarity_bin_mismatch():
    with pytest.raises(BinMismatch):
        similarity(dist([1, 2]), dist([1, 2, 3]))


def test_ks_metric():
    assert similarity(dist([1, 0]), dist([0, 1]), metric="ks") == pytest.approx(0.0)
    assert similarity(dist([1, 1]), dist([1, 1]), metric="ks") == pytest.approx(1.0)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 20), min_size=5, max_size=5).filter(any),
       st.lists(st.integers(0, 20), min_size=5, max_size=5).filter(any))
def test_property_similarity_symmetric_bounded(a, b):
    da, db = dist(a), dist(b)
    w = similarity(da, db)
    assert 0 <= w <= 1
    assert w == similarity(db, da)
    assert similarity(da, da) == pytest.approx(1.0, abs=1e-12)
    js = jensen_shannon(da.probabilities, db.probabilities)
    assert 0 <= js <= 1


# --- network ---

def test_network_sizes():
    recs = artist_records("a", [0.3] * 5) + artist_records("b", [0.4] * 5)
    assert len(build_network(recs).edges) == 1
    recs = sum((artist_records(f"x{i}", [0.1 * (i % 9) + 0.01] * 5) for i in range(10)), [])
    assert len(build_network(recs).edges) == 45


def test_network_too_few_artists():
    with pytest.raises(TooFewArtists):
        build_network(artist_records("a", [0.3] * 5) + artist_records("b", [0.3] * 2))


def test_network_groups_nonoverlapping():
    s = DeterministicStream(8)
    recs = []
    for i in range(4):
        recs += artist_records(f"lo{i}", list(0.10 + 0.08 * s.uniform(20)))
        recs += artist_records(f"hi{i}", list(0.55 + 0.08 * s.uniform(20)))
    g = build_network(recs)
    for (a, b), w in g.edges.items():
        if a[:2] == b[:2]:
            assert w > 0
        else:
            assert w == 0.0
    # a threshold inside the gap keeps exactly the within-group edges
    p = prune(g, 1e-9)
    assert set(p.edges) == {k for k in g.edges if k[0][:2] == k[1][:2]}
    assert len(p.nodes) == 8


def test_prune_identity_and_top():
    g = two_clique_graph(0.3)
    assert prune(g, 0.0).edges == g.edges
    assert set(prune(g, 1.0).edges) == {k for k, w in g.edges.items() if w == 1.0}


def test_prune_default_percentile():
    g = SimilarityGraph(list("abcde"), {("a", "b"): 0.1, ("a", "c"): 0.2, ("a", "d"): 0.3, ("a", "e"): 0.4,
                                         ("b", "c"): 0.5})
    assert default_threshold(g) == pytest.approx(np.percentile([0.1, 0.2, 0.3, 0.4, 0.5], 75))
    assert set(prune(g).edges.values()) == {0.4, 0.5}


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1))
def test_property_prune_monotone(t1, t2):
    lo, hi = sorted((t1, t2))
    s = DeterministicStream(5)
    w = s.uniform(15)
    g = SimilarityGraph(list("abcdef"), dict(zip(itertools.combinations("abcdef", 2), w)))
    assert set(prune(g, hi).edges) <= set(prune(g, lo).edges)


# --- modularity and communities ---

def test_modularity_trivial():
    g = SimilarityGraph(list("abc"), {})
    assert modularity(g, {n: i for i, n in enumerate("abc")}) == 0.0
    g = two_clique_graph()
    assert modularity(g, {n: 0 for n in g.nodes}) == pytest.approx(0.0, abs=1e-15)


def test_modularity_incomplete():
    with pytest.raises(IncompletePartition):
        modularity(two_clique_graph(), {"a": 0})


def test_modularity_matches_oracles():
    g = two_clique_graph()
    part = {n: 0 if n in "abcd" else 1 for n in g.nodes}
    q = modularity(g, part)
    assert abs(q - oracle_modularity(g.nodes, g.edges, part)) <= 1e-12
    G = nx.Graph()
    G.add_weighted_edges_from((a, b, w) for (a, b), w in g.edges.items())
    assert q == pytest.approx(nx.community.modularity(G, [set("abcd"), set("efgh")]), abs=1e-12)


def test_single_node():
    p = detect_communities(SimilarityGraph(["solo"], {}))
    assert p.assignment == {"solo": 0} and p.modularity == 0


def test_two_cliques_against_exhaustive():
    g = two_clique_graph()
    p = detect_communities(g)
    assert p.groups() == [list("abcd"), list("efgh")]
    best = max(oracle_modularity(g.nodes, g.edges, {n: i for i, blk in enumerate(part) for n in blk})
               for part in set_partitions(g.nodes))
    assert abs(p.modularity - best) <= 1e-12


def test_isolated_nodes_stay_singletons():
    g = two_clique_graph()
    g = SimilarityGraph(g.nodes + ["z"], g.edges)
    p = detect_communities(g)
    assert p.n_communities == 3 and p.groups()[-1] == ["z"]


def test_communities_beat_singletons_random():
    s = DeterministicStream(9)
    for trial in range(20):
        nodes = [f"n{i}" for i in range(9)]
        w = s.uniform(36)
        edges = {k: float(x) for k, x in zip(itertools.combinations(nodes, 2), w) if x > 0.5}
        g = SimilarityGraph(nodes, edges)
        p = detect_communities(g)
        single = modularity(g, {n: i for i, n in enumerate(nodes)})
        assert p.modularity >= single - 1e-12
        assert -0.5 <= p.modularity <= 1
        assert abs(p.modularity - oracle_modularity(nodes, edges, p.assignment)) <= 1e-12


def test_relabel_invariance():
    g = two_clique_graph()
    rename = dict(zip("abcdefgh", "qwertyui"))
    g2 = SimilarityGraph(sorted(rename.values()),
                         {(rename[a], rename[b]): w for (a, b), w in g.edges.items()})
    p1, p2 = detect_communities(g), detect_communities(g2)
    groups1 = sorted(sorted(rename[n] for n in grp) for grp in p1.groups())
    assert groups1 == sorted(p2.groups())
    assert p1.modularity == pytest.approx(p2.modularity, abs=1e-12)


def test_tables(tmp_path):
    recs = sum((artist_records(a, [0.3 + 0.01 * i for i in range(6)]) for a in "abc"), [])
    g = build_network(recs)
    p = detect_communities(g)
    write_edge_list(g, tmp_path / "e.csv")
    write_node_table(g, p, tmp_path / "n.csv", {"prune_threshold": 0.0})
    assert (tmp_path / "e.csv").read_text().splitlines()[0] == "artist_a,artist_b,weight"
    rows, footer = read_node_table(tmp_path / "n.csv")
    assert [r["artist"] for r in rows] == ["a", "b", "c"]
    assert float(footer["modularity"]) == pytest.approx(p.modularity, abs=1e-11)
    assert rows[0]["n"] == "6"
