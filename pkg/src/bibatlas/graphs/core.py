"""Undirected weighted graph with deterministic persistence.

Nodes are string keys with a free-form attribute dict; edges are unordered
key pairs with strictly positive weights and no self-loops. Persistence is
two JSON Lines files (nodes, edges) under schema tag "graph-v1" plus a
binary adjacency cache keyed by the graph content digest.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np

from ..ioutil import read_jsonl, write_jsonl, write_npz

GRAPH_SCHEMA = "graph-v1"


class WeightedGraph:
    def __init__(self, layer: str = "") -> None:
        self.layer = layer
        self.node_attrs: dict[str, dict] = {}
        self._adj: dict[str, dict[str, float]] = {}

    # -- construction -----------------------------------------------------

    def add_node(self, key: str, **attrs) -> None:
        self._adj.setdefault(key, {})
        self.node_attrs.setdefault(key, {}).update(attrs)

    def add_edge(self, a: str, b: str, weight: float) -> None:
        if a == b:
            raise ValueError(f"self-loop on {a!r}")
        if not weight > 0:
            raise ValueError(f"non-positive weight {weight!r} on ({a!r}, {b!r})")
        self.add_node(a)
        self.add_node(b)
        self._adj[a][b] = float(weight)
        self._adj[b][a] = float(weight)

    def remove_edge(self, a: str, b: str) -> None:
        del self._adj[a][b]
        del self._adj[b][a]

    # -- queries ----------------------------------------------------------

    def __contains__(self, key: str) -> bool:
        return key in self._adj

    def __len__(self) -> int:
        return len(self._adj)

    @property
    def nodes(self) -> list[str]:
        return sorted(self._adj)

    def neighbors(self, key: str) -> dict[str, float]:
        return self._adj[key]

    def has_edge(self, a: str, b: str) -> bool:
        return b in self._adj.get(a, ())

    def weight(self, a: str, b: str, default: float = 0.0) -> float:
        return self._adj.get(a, {}).get(b, default)

    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self._adj.values()) // 2

    def edges(self) -> list[tuple[str, str, float]]:
        out = []
        for a in sorted(self._adj):
            for b, w in self._adj[a].items():
                if a < b:
                    out.append((a, b, w))
        return out

    def degree(self, key: str) -> int:
        return len(self._adj[key])

    def strength(self, key: str) -> float:
        return sum(self._adj[key].values())

    def total_weight(self) -> float:
        return sum(w for _, _, w in self.edges())

    # -- structure --------------------------------------------------------

    def connected_components(self) -> list[set[str]]:
        """Components sorted by (-size, smallest member key)."""
        seen: set[str] = set()
        comps: list[set[str]] = []
        for start in sorted(self._adj):
            if start in seen:
                continue
            comp = {start}
            stack = [start]
            while stack:
                u = stack.pop()
                for v in self._adj[u]:
                    if v not in comp:
                        comp.add(v)
                        stack.append(v)
            seen |= comp
            comps.append(comp)
        comps.sort(key=lambda c: (-len(c), min(c)))
        return comps

    def subgraph_min_weight(self, threshold: float) -> "WeightedGraph":
        """Copy keeping every node but only edges with weight >= threshold."""
        sub = WeightedGraph(layer=self.layer)
        for key in self._adj:
            sub.add_node(key, **self.node_attrs.get(key, {}))
        for a, b, w in self.edges():
            if w >= threshold:
                sub.add_edge(a, b, w)
        return sub

    def subgraph_nodes(self, keys) -> "WeightedGraph":
        keep = set(keys)
        sub = WeightedGraph(layer=self.layer)
        for key in sorted(keep):
            if key in self._adj:
                sub.add_node(key, **self.node_attrs.get(key, {}))
        for a, b, w in self.edges():
            if a in keep and b in keep:
                sub.add_edge(a, b, w)
        return sub

    # -- persistence ------------------------------------------------------

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.layer.encode("utf-8"))
        for key in sorted(self._adj):
            h.update(b"\x00n")
            h.update(key.encode("utf-8"))
        for a, b, w in self.edges():
            h.update(b"\x00e")
            h.update(f"{a}\x1f{b}\x1f{w!r}".encode("utf-8"))
        return h.hexdigest()

    def index_arrays(self) -> tuple[list[str], np.ndarray, np.ndarray, np.ndarray]:
        """CSR-style arrays (keys, indptr, indices, weights) over sorted keys."""
        keys = sorted(self._adj)
        pos = {k: i for i, k in enumerate(keys)}
        indptr = np.zeros(len(keys) + 1, dtype=np.int64)
        counts = [len(self._adj[k]) for k in keys]
        indptr[1:] = np.cumsum(counts)
        indices = np.empty(int(indptr[-1]), dtype=np.int64)
        weights = np.empty(int(indptr[-1]), dtype=np.float64)
        at = 0
        for k in keys:
            nbrs = sorted(self._adj[k])
            for nb in nbrs:
                indices[at] = pos[nb]
                weights[at] = self._adj[k][nb]
                at += 1
        return keys, indptr, indices, weights


def save_graph(graph: WeightedGraph, nodes_path: str | Path, edges_path: str | Path,
               cache_dir: str | Path | None = None, extra_meta: dict | None = None) -> str:
    """Persist graph-v1 JSONL pair; optionally refresh the adjacency cache.

    Returns the content digest that keys the cache file.
    """
    digest = graph.digest()
    meta = {"schema": GRAPH_SCHEMA, "layer": graph.layer, "digest": digest}
    if extra_meta:
        meta.update(extra_meta)
    node_rows = (
        {"key": k, **_jsonable_attrs(graph.node_attrs.get(k, {}))} for k in graph.nodes
    )
    write_jsonl(nodes_path, node_rows, meta={**meta, "kind": "nodes", "count": len(graph)})
    edge_rows = ({"a": a, "b": b, "weight": w} for a, b, w in graph.edges())
    write_jsonl(
        edges_path, edge_rows, meta={**meta, "kind": "edges", "count": graph.edge_count()}
    )
    if cache_dir is not None:
        keys, indptr, indices, weights = graph.index_arrays()
        write_npz(
            Path(cache_dir) / f"adj-{digest[:24]}.npz",
            {
                "keys": np.array(keys),
                "indptr": indptr,
                "indices": indices,
                "weights": weights,
            },
        )
    return digest


def _jsonable_attrs(attrs: dict) -> dict:
    out = {}
    for k, v in attrs.items():
        out[k] = sorted(v) if isinstance(v, (set, frozenset)) else v
    return out


def load_graph(nodes_path: str | Path, edges_path: str | Path) -> WeightedGraph:
    node_rows, node_meta = read_jsonl(nodes_path)
    edge_rows, edge_meta = read_jsonl(edges_path)
    for meta, path in ((node_meta, nodes_path), (edge_meta, edges_path)):
        if not meta or meta.get("schema") != GRAPH_SCHEMA:
            raise ValueError(f"{path}: missing or unexpected graph schema")
    graph = WeightedGraph(layer=node_meta.get("layer", ""))
    for row in node_rows:
        attrs = {k: v for k, v in row.items() if k != "key"}
        graph.add_node(row["key"], **attrs)
    for row in edge_rows:
        graph.add_edge(row["a"], row["b"], row["weight"])
    if node_meta.get("digest") != graph.digest():
        raise ValueError(f"{nodes_path}: content digest mismatch (stale or edited)")
    return graph
