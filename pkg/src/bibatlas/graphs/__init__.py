"""Weighted undirected graphs: construction, metrics, persistence."""

from .core import WeightedGraph, load_graph, save_graph
from .build import (
    build_coauthor,
    giant_component_series,
    multiplex_merge,
    mutual_knn,
)
from .metrics import (
    bfs_distances,
    edge_betweenness_bridges,
    geodesic_distance,
    network_diagnostics,
    pagerank,
)

__all__ = [
    "WeightedGraph",
    "bfs_distances",
    "build_coauthor",
    "edge_betweenness_bridges",
    "geodesic_distance",
    "giant_component_series",
    "load_graph",
    "multiplex_merge",
    "mutual_knn",
    "network_diagnostics",
    "pagerank",
    "save_graph",
]
