"""Graph construction: coauthor layer, mutual-kNN layer, multiplex merge."""

from __future__ import annotations

import math
from collections import Counter, defaultdict

import numpy as np

from .core import WeightedGraph


def build_coauthor(papers, min_papers: int = 2) -> WeightedGraph:
    """Coauthorship graph: weight = number of shared papers.

    Nodes are authors with at least min_papers papers; every qualifying
    pair gets an edge (weight-1 edges stay in the base graph, display views
    threshold later). Node attributes carry paper_count, citations, and
    first/last publication year; partners connected by exactly one shared
    paper are recorded per node so thresholded views can still report them.
    """
    paper_counts: Counter = Counter()
    for paper in papers:
        for key in set(paper.authors):
            paper_counts[key] += 1

    keep = {k for k, c in paper_counts.items() if c >= min_papers}
    graph = WeightedGraph(layer="coauthor")

    stats: dict[str, dict] = {}
    pair_weights: Counter = Counter()
    for paper in papers:
        members = sorted(set(paper.authors) & keep)
        for key in members:
            st = stats.setdefault(
                key, {"paper_count": 0, "citations": 0, "first_year": paper.year, "last_year": paper.year}
            )
            st["paper_count"] += 1
            st["citations"] += paper.citations
            st["first_year"] = min(st["first_year"], paper.year)
            st["last_year"] = max(st["last_year"], paper.year)
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                pair_weights[(members[i], members[j])] += 1

    for key in sorted(keep):
        graph.add_node(key, **stats[key])
    for (a, b), w in pair_weights.items():
        graph.add_edge(a, b, float(w))

    single = defaultdict(list)
    for (a, b), w in sorted(pair_weights.items()):
        if w == 1:
            single[a].append(b)
            single[b].append(a)
    for key in graph.nodes:
        graph.node_attrs[key]["single_partners"] = sorted(single.get(key, []))
    return graph


def giant_component_series(
    papers, cutoff_years: list[int], min_papers: int = 2
) -> dict[int, float]:
    """Fraction of nodes in the largest component of each <=Y rebuild."""
    out: dict[int, float] = {}
    papers = list(papers)
    for year in cutoff_years:
        window = [p for p in papers if p.year <= year]
        graph = build_coauthor(window, min_papers=min_papers)
        if len(graph) == 0:
            out[year] = 0.0
            continue
        components = graph.connected_components()
        out[year] = len(components[0]) / len(graph)
    return out


def mutual_knn(vectors: dict[str, np.ndarray], k: int) -> WeightedGraph:
    """Mutual k-nearest-neighbor graph under cosine similarity.

    Edge (a, b) exists iff each is in the other's top-k list; ties in
    cosine break by key order; the edge weight is the cosine. With fewer
    than k+1 items k is truncated to n-1. Pairs with non-positive cosine
    are not materialized (edge weights must stay positive).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    keys = sorted(vectors)
    n = len(keys)
    if n < 2:
        return WeightedGraph(layer="semantic")
    k = min(k, n - 1)

    mat = np.stack([np.asarray(vectors[key], dtype=np.float64) for key in keys])
    norms = np.linalg.norm(mat, axis=1)
    if np.any(norms == 0):
        raise ValueError("zero vector in kNN input")
    unit = mat / norms[:, None]

    top: list[list[int]] = []
    block = max(1, min(1024, n))
    for start in range(0, n, block):
        stop = min(start + block, n)
        sims = unit[start:stop] @ unit.T
        for local, row in enumerate(sims):
            row[start + local] = -np.inf  # never self
            # lexsort on (index, -cos) = descending cosine, key order on ties
            order = np.lexsort((np.arange(n), -row))
            top.append([int(j) for j in order[:k]])

    top_sets = [set(t) for t in top]
    graph = WeightedGraph(layer="semantic")
    for key in keys:
        graph.add_node(key)
    for i, key in enumerate(keys):
        for j in top[i]:
            if j > i and i in top_sets[j]:
                cos = float(unit[i] @ unit[j])
                if cos > 0:
                    graph.add_edge(key, keys[j], cos)
    return graph


def multiplex_merge(
    coauthor: WeightedGraph,
    author_vectors: dict[str, np.ndarray],
    alpha: float = 0.5,
    tau_s: float = 0.60,
    k: int = 5,
) -> WeightedGraph:
    """Merge the collaboration and semantic layers into one weighted graph.

    Coauthor edges contribute alpha * ln(1 + w_ab). Pairs that list each
    other among their top-k semantic neighbors AND exceed tau_s contribute
    (1 - alpha) * (cos - tau_s) / (1 - tau_s); a cosine of exactly tau_s
    yields term 0 and no edge. Both layers live on the coauthor node set.
    """
    merged = WeightedGraph(layer="merged")
    for key in coauthor.nodes:
        merged.add_node(key, **coauthor.node_attrs.get(key, {}))

    weights: dict[tuple[str, str], float] = {}
    for a, b, w in coauthor.edges():
        weights[(a, b)] = alpha * math.log1p(w)

    usable = {k_: v for k_, v in author_vectors.items() if k_ in coauthor}
    if usable and k >= 1 and len(usable) >= 2:
        semantic = mutual_knn(usable, k)
        for a, b, cos in semantic.edges():
            if cos > tau_s:
                term = (1.0 - alpha) * (cos - tau_s) / (1.0 - tau_s)
                pair = (a, b) if a < b else (b, a)
                weights[pair] = weights.get(pair, 0.0) + term

    for (a, b), w in weights.items():
        if w > 0:
            merged.add_edge(a, b, w)
    return merged
