"""Community detection: optimality on small graphs, determinism, and the
connectivity guarantee.

Small instances are checked against exhaustive enumeration of every node
partition scored by an independent quality oracle.
"""

import math

import numpy as np
import pytest

from bibatlas.graphs.core import WeightedGraph
from bibatlas.communities.leiden import Partition, leiden, merge_islands, rb_quality

from oracles import max_rb_quality, rb_quality_oracle


def _random_graph(seed, n, p=0.5):
    rng = np.random.default_rng(seed)
    g = WeightedGraph(layer="test")
    names = [f"n{i}" for i in range(n)]
    for name in names:
        g.add_node(name)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                g.add_edge(names[i], names[j], float(rng.integers(1, 5)))
    return g


def _two_triangles():
    g = WeightedGraph(layer="test")
    for a, b in (("a", "b"), ("b", "c"), ("a", "c"), ("x", "y"), ("y", "z"), ("x", "z")):
        g.add_edge(a, b, 1.0)
    g.add_edge("c", "x", 1.0)
    return g


class TestOptimality:
    @pytest.mark.parametrize("seed", range(8))
    def test_attains_enumerated_maximum(self, seed):
        n = 4 + seed % 5
        g = _random_graph(seed, n=n, p=0.55)
        part = leiden(g, resolution=1.0, seed=42)
        best, _ = max_rb_quality(g, 1.0)
        assert part.quality <= best + 1e-12
        assert abs(part.quality - best) < 1e-12

    def test_quality_field_matches_oracle_recomputation(self):
        g = _random_graph(3, n=7)
        part = leiden(g, resolution=1.0, seed=42)
        assert math.isclose(
            part.quality, rb_quality_oracle(g, part.assignment, 1.0), rel_tol=1e-12
        )
        assert math.isclose(
            part.quality, rb_quality(g, part.assignment, 1.0), rel_tol=1e-12
        )

    def test_two_triangles_split(self):
        part = leiden(_two_triangles(), resolution=1.0, seed=42)
        groups = {frozenset(m) for m in part.communities().values()}
        assert groups == {frozenset("abc"), frozenset("xyz")}

    def test_resolution_drives_granularity(self):
        g = _two_triangles()
        coarse = leiden(g, resolution=0.05, seed=42)
        fine = leiden(g, resolution=1.0, seed=42)
        assert len(coarse.communities()) <= len(fine.communities())
        assert len(coarse.communities()) == 1


class TestDeterminismAndLabels:
    def test_repeat_runs_identical(self):
        g = _random_graph(11, n=30, p=0.15)
        a = leiden(g, resolution=1.0, seed=42)
        b = leiden(g, resolution=1.0, seed=42)
        assert a.assignment == b.assignment
        assert a.quality == b.quality

    def test_seeds_change_order_not_optimum(self):
        g = _random_graph(5, n=7, p=0.6)
        best, _ = max_rb_quality(g, 1.0)
        for seed in (0, 1, 7, 42):
            part = leiden(g, resolution=1.0, seed=seed)
            assert abs(part.quality - best) < 1e-12

    def test_ids_dense_and_size_ordered(self):
        part = leiden(_two_triangles(), resolution=1.0, seed=42)
        sizes = part.sizes()
        assert sorted(sizes) == list(range(len(sizes)))
        ordered = [sizes[c] for c in sorted(sizes)]
        assert ordered == sorted(ordered, reverse=True)
        # equal-size tie goes to the community with the smaller member key
        communities = part.communities()
        assert min(communities[0]) < min(communities[1])

    def test_meta_carries_log_and_digest(self):
        g = _random_graph(2, n=6)
        part = leiden(g, resolution=1.0, seed=42)
        assert part.meta["graph_digest"] == g.digest()
        assert part.meta["quality_log"][-1] == part.quality


class TestConnectivity:
    @pytest.mark.parametrize("seed,n,p", [(0, 120, 0.03), (1, 200, 0.015), (2, 80, 0.06)])
    def test_every_community_connected(self, seed, n, p):
        g = _random_graph(seed, n=n, p=p)
        part = leiden(g, resolution=1.0, seed=42)
        for members in part.communities().values():
            sub = g.subgraph_nodes(members)
            assert len(sub.connected_components()) == 1

    def test_singleton_graph(self):
        g = WeightedGraph(layer="test")
        g.add_node("only")
        part = leiden(g, resolution=1.0, seed=42)
        assert part.assignment == {"only": 0}
        assert part.quality == 0.0


class TestValidation:
    def test_empty_graph_raises(self):
        with pytest.raises(ValueError):
            leiden(WeightedGraph(), resolution=1.0)

    def test_bad_resolution_raises(self):
        g = _random_graph(0, n=4)
        with pytest.raises(ValueError):
            leiden(g, resolution=0.0)


class TestMergeIslands:
    def _partition(self):
        assignment = {}
        sizes = {0: 12, 1: 5, 2: 3, 3: 2}
        at = 0
        for cid, size in sizes.items():
            for _ in range(size):
                assignment[f"k{at:02d}"] = cid
                at += 1
        return Partition(
            assignment=assignment, layer="test", resolution=1.0, seed=42, quality=0.5
        )

    def test_islands_pooled_into_misc(self):
        part = self._partition()
        merged = merge_islands(part, WeightedGraph(), min_size=5)
        sizes = merged.sizes()
        assert merged.misc_bucket == 2
        assert sizes == {0: 12, 1: 5, 2: 5}
        assert merged.meta["mainland_communities"] == 2
        assert merged.meta["island_communities_merged"] == 2
        assert merged.meta["min_community_size"] == 5

    def test_no_islands_no_bucket(self):
        part = self._partition()
        merged = merge_islands(part, WeightedGraph(), min_size=2)
        assert merged.misc_bucket is None
        assert merged.sizes() == {0: 12, 1: 5, 2: 3, 3: 2}

    def test_everything_small_single_bucket(self):
        part = self._partition()
        merged = merge_islands(part, WeightedGraph(), min_size=50)
        assert merged.misc_bucket == 0
        assert merged.sizes() == {0: 22}


class TestPersistence:
    def test_roundtrip(self, tmp_path):
        g = _random_graph(4, n=10, p=0.4)
        part = merge_islands(leiden(g, resolution=0.8, seed=7), g, min_size=2)
        path = tmp_path / "part.json"
        part.save(path)
        loaded = Partition.load(path)
        assert loaded.assignment == part.assignment
        assert loaded.layer == part.layer
        assert loaded.resolution == part.resolution
        assert loaded.seed == part.seed
        assert loaded.quality == part.quality
        assert loaded.misc_bucket == part.misc_bucket
        assert loaded.meta == part.meta

    def test_bad_schema_rejected(self, tmp_path):
        from bibatlas.ioutil import write_json

        path = tmp_path / "part.json"
        write_json(path, {"schema": "other-v1"})
        with pytest.raises(ValueError):
            Partition.load(path)
