"""Graph construction layers and the weighted-graph container.

The mutual-kNN tests check the fast blocked implementation against a plain
O(n^2) re-ranking oracle, including the tie rule (descending cosine, then
key order).
"""

import math

import numpy as np
import pytest

from bibatlas.graphs.build import (
    build_coauthor,
    giant_component_series,
    multiplex_merge,
    mutual_knn,
)
from bibatlas.graphs.core import WeightedGraph, load_graph, save_graph


def _mutual_knn_oracle(vectors, k):
    """Independent mutual-kNN: explicit sort per node, no blocking."""
    keys = sorted(vectors)
    n = len(keys)
    if n < 2:
        return {}
    k = min(k, n - 1)
    unit = {}
    for key in keys:
        v = np.asarray(vectors[key], dtype=np.float64)
        unit[key] = v / np.linalg.norm(v)
    top = {}
    for i, a in enumerate(keys):
        ranked = sorted(
            (j for j in range(n) if j != i),
            key=lambda j: (-float(unit[a] @ unit[keys[j]]), j),
        )
        top[i] = ranked[:k]
    edges = {}
    for i in range(n):
        for j in top[i]:
            if j > i and i in top[j]:
                cos = float(unit[keys[i]] @ unit[keys[j]])
                if cos > 0:
                    edges[(keys[i], keys[j])] = cos
    return edges


class TestBuildCoauthor:
    def _papers(self, mkpaper):
        return [
            mkpaper("p1", ["A", "B"], year=2000, citations=5),
            mkpaper("p2", ["A", "B", "C"], year=2001, citations=3),
            mkpaper("p3", ["A", "C"], year=2002, citations=2),
            mkpaper("p4", ["D", "E"], year=2002, citations=9),
        ]

    def test_hand_weights_and_filter(self, mkpaper):
        graph = build_coauthor(self._papers(mkpaper), min_papers=2)
        # D and E have one paper each and drop out entirely
        assert graph.nodes == ["A", "B", "C"]
        assert graph.weight("A", "B") == 2.0
        assert graph.weight("A", "C") == 2.0
        assert graph.weight("B", "C") == 1.0

    def test_node_attributes(self, mkpaper):
        graph = build_coauthor(self._papers(mkpaper), min_papers=2)
        a = graph.node_attrs["A"]
        assert a["paper_count"] == 3
        assert a["citations"] == 10
        assert (a["first_year"], a["last_year"]) == (2000, 2002)
        b = graph.node_attrs["B"]
        assert b["paper_count"] == 2 and b["citations"] == 8

    def test_single_partners_recorded(self, mkpaper):
        graph = build_coauthor(self._papers(mkpaper), min_papers=2)
        assert graph.node_attrs["B"]["single_partners"] == ["C"]
        assert graph.node_attrs["C"]["single_partners"] == ["B"]
        assert graph.node_attrs["A"]["single_partners"] == []

    def test_duplicate_author_on_one_paper_counts_once(self, mkpaper):
        papers = [
            mkpaper("p1", ["A", "A", "B"], year=2000),
            mkpaper("p2", ["A", "B"], year=2001),
        ]
        graph = build_coauthor(papers, min_papers=2)
        assert graph.node_attrs["A"]["paper_count"] == 2
        assert graph.weight("A", "B") == 2.0

    def test_min_papers_one_keeps_everyone(self, mkpaper):
        graph = build_coauthor(self._papers(mkpaper), min_papers=1)
        assert graph.nodes == ["A", "B", "C", "D", "E"]
        assert graph.weight("D", "E") == 1.0


class TestGiantSeries:
    def test_two_island_merge(self, mkpaper):
        papers = [
            mkpaper("p1", ["a", "b"], year=2000),
            mkpaper("p2", ["a", "b"], year=2000),
            mkpaper("p3", ["c", "d"], year=2000),
            mkpaper("p4", ["c", "d"], year=2000),
            mkpaper("p5", ["b", "c"], year=2005),
            mkpaper("p6", ["b", "c"], year=2005),
        ]
        series = giant_component_series(papers, [1999, 2000, 2005])
        assert series == {1999: 0.0, 2000: 0.5, 2005: 1.0}


class TestMutualKnn:
    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_matches_oracle(self, seed):
        rng = np.random.default_rng(seed)
        vectors = {f"n{i:02d}": rng.normal(size=8) for i in range(40)}
        got = mutual_knn(vectors, k=4)
        expected = _mutual_knn_oracle(vectors, k=4)
        assert {(a, b) for a, b, _ in got.edges()} == set(expected)
        for a, b, w in got.edges():
            assert math.isclose(w, expected[(a, b)], rel_tol=1e-12)

    def test_tie_breaks_by_key_order(self):
        # three identical vectors, k=1: each ranks the lowest OTHER index
        # first, so only (n0, n1) is mutual
        v = np.array([0.6, 0.8])
        got = mutual_knn({"n0": v, "n1": v, "n2": v}, k=1)
        assert [(a, b) for a, b, _ in got.edges()] == [("n0", "n1")]

    def test_k_truncated_to_n_minus_one(self):
        rng = np.random.default_rng(7)
        base = rng.normal(size=4)
        vectors = {
            f"n{i}": base + 0.01 * rng.normal(size=4) for i in range(3)
        }
        got = mutual_knn(vectors, k=50)
        assert got.edge_count() == 3  # complete on near-parallel vectors

    def test_non_positive_cosine_dropped(self):
        got = mutual_knn({"a": np.array([1.0, 0.0]), "b": np.array([-1.0, 0.0])}, k=1)
        assert len(got) == 2 and got.edge_count() == 0

    def test_small_and_invalid_inputs(self):
        assert len(mutual_knn({"a": np.ones(3)}, k=2)) == 0
        with pytest.raises(ValueError):
            mutual_knn({"a": np.ones(3), "b": np.ones(3)}, k=0)
        with pytest.raises(ValueError):
            mutual_knn({"a": np.zeros(3), "b": np.ones(3)}, k=1)


class TestMultiplexMerge:
    def test_hand_values(self):
        coauthor = WeightedGraph(layer="coauthor")
        coauthor.add_edge("A", "B", 3.0)
        coauthor.add_edge("A", "C", 1.0)
        coauthor.add_node("D", paper_count=4)
        vectors = {"A": np.array([1.0, 0.0]), "B": np.array([0.8, 0.6])}
        merged = multiplex_merge(coauthor, vectors, alpha=0.5, tau_s=0.6, k=5)
        assert merged.nodes == ["A", "B", "C", "D"]
        assert merged.node_attrs["D"] == {"paper_count": 4}
        # collaboration term 0.5*ln(1+w) plus semantic term on the A-B pair
        assert math.isclose(
            merged.weight("A", "B"),
            0.5 * math.log(4.0) + 0.5 * (0.8 - 0.6) / 0.4,
            rel_tol=1e-12,
        )
        assert math.isclose(merged.weight("A", "C"), 0.5 * math.log(2.0), rel_tol=1e-12)
        assert merged.degree("D") == 0

    def test_semantic_only_edge_and_tau_gate(self):
        coauthor = WeightedGraph(layer="coauthor")
        coauthor.add_edge("A", "B", 2.0)
        coauthor.add_node("C")
        va = np.array([1.0, 0.0])
        vb = np.array([0.0, 1.0])   # cos(A,B) = 0, below the gate
        vc = np.array([0.96, 0.28])  # cos(A,C) well above the gate
        merged = multiplex_merge(coauthor, {"A": va, "B": vb, "C": vc}, alpha=0.5, tau_s=0.6, k=2)
        cos_ac = float(va @ vc) / float(np.linalg.norm(va) * np.linalg.norm(vc))
        assert math.isclose(merged.weight("A", "B"), 0.5 * math.log(3.0), rel_tol=1e-12)
        assert math.isclose(
            merged.weight("A", "C"), 0.5 * (cos_ac - 0.6) / 0.4, rel_tol=1e-12
        )
        assert not merged.has_edge("B", "C")

    def test_vectors_outside_node_set_ignored(self):
        coauthor = WeightedGraph(layer="coauthor")
        coauthor.add_edge("A", "B", 1.0)
        vectors = {"A": np.ones(3), "Z": np.ones(3)}  # Z is not a node
        merged = multiplex_merge(coauthor, vectors, alpha=0.5, tau_s=0.6, k=3)
        assert "Z" not in merged
        assert math.isclose(merged.weight("A", "B"), 0.5 * math.log(2.0), rel_tol=1e-12)


class TestContainer:
    def test_rejects_self_loop_and_bad_weight(self):
        g = WeightedGraph()
        with pytest.raises(ValueError):
            g.add_edge("a", "a", 1.0)
        with pytest.raises(ValueError):
            g.add_edge("a", "b", 0.0)
        with pytest.raises(ValueError):
            g.add_edge("a", "b", -2.0)

    def test_components_ordering(self):
        g = WeightedGraph()
        g.add_edge("x", "y", 1.0)
        g.add_edge("a", "b", 1.0)
        g.add_edge("b", "c", 1.0)
        g.add_node("solo")
        comps = g.connected_components()
        assert comps == [{"a", "b", "c"}, {"x", "y"}, {"solo"}]

    def test_subgraph_min_weight_keeps_nodes(self):
        g = WeightedGraph()
        g.add_edge("a", "b", 1.0)
        g.add_edge("b", "c", 5.0)
        sub = g.subgraph_min_weight(2.0)
        assert sub.nodes == ["a", "b", "c"]
        assert sub.edge_count() == 1 and sub.has_edge("b", "c")

    def test_index_arrays_csr(self):
        g = WeightedGraph()
        g.add_edge("a", "b", 2.0)
        g.add_edge("a", "c", 3.0)
        keys, indptr, indices, weights = g.index_arrays()
        assert keys == ["a", "b", "c"]
        assert indptr.tolist() == [0, 2, 3, 4]
        assert indices.tolist() == [1, 2, 0, 0]
        assert weights.tolist() == [2.0, 3.0, 2.0, 3.0]


class TestPersistence:
    def _graph(self):
        g = WeightedGraph(layer="coauthor")
        g.add_edge("a", "b", 2.0)
        g.add_edge("b", "c", 1.5)
        g.add_node("a", paper_count=3, flags={"x", "a"})
        return g

    def test_roundtrip(self, tmp_path):
        g = self._graph()
        digest = save_graph(g, tmp_path / "n.jsonl", tmp_path / "e.jsonl")
        loaded = load_graph(tmp_path / "n.jsonl", tmp_path / "e.jsonl")
        assert loaded.digest() == digest
        assert loaded.weight("a", "b") == 2.0
        # set attributes come back as sorted lists
        assert loaded.node_attrs["a"]["flags"] == ["a", "x"]

    def test_tampered_edge_detected(self, tmp_path):
        g = self._graph()
        save_graph(g, tmp_path / "n.jsonl", tmp_path / "e.jsonl")
        edges = tmp_path / "e.jsonl"
        text = edges.read_text().replace('"weight":2.0', '"weight":9.0')
        edges.write_text(text)
        with pytest.raises(ValueError, match="digest"):
            load_graph(tmp_path / "n.jsonl", tmp_path / "e.jsonl")

    def test_cache_file_written(self, tmp_path):
        g = self._graph()
        digest = save_graph(
            g, tmp_path / "n.jsonl", tmp_path / "e.jsonl", cache_dir=tmp_path
        )
        assert (tmp_path / f"adj-{digest[:24]}.npz").exists()
