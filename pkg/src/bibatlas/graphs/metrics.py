"""Distances, betweenness, PageRank, and the diagnostics report."""

from __future__ import annotations

import math
import random
from collections import Counter, deque

import numpy as np
from scipy import stats as sps

from .core import WeightedGraph

EXACT_BETWEENNESS_MAX_NODES = 50_000
DEFAULT_PATH_SAMPLE = 2000
DEFAULT_SEED = 1337


def geodesic_distance(graph: WeightedGraph, a: str, b: str, cap: int = 3) -> int | None:
    """Hop count between a and b, or None when it is >= cap.

    Breadth-first with early exit: the search never expands past depth
    cap - 1, so the cost is bounded by the cap-ball around a.
    """
    if a not in graph or b not in graph:
        raise KeyError("both endpoints must be graph nodes")
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if a == b:
        return 0
    dist = {a: 0}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        du = dist[u]
        if du + 1 >= cap:
            continue
        for v in graph.neighbors(u):
            if v not in dist:
                if v == b:
                    return du + 1
                dist[v] = du + 1
                queue.append(v)
    return None


def bfs_distances(graph: WeightedGraph, source: str, cap: int | None = None) -> dict[str, int]:
    """All hop distances from source strictly below cap (unbounded if None)."""
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u]
        if cap is not None and du + 1 >= cap:
            continue
        for v in graph.neighbors(u):
            if v not in dist:
                dist[v] = du + 1
                queue.append(v)
    return dist


def _csr(graph: WeightedGraph):
    keys, indptr, indices, _ = graph.index_arrays()
    return keys, indptr, indices


def _brandes(indptr: np.ndarray, indices: np.ndarray, n: int, sources) -> tuple[np.ndarray, dict]:
    """Shortest-path betweenness accumulation over unweighted hops.

    Returns (node_betweenness, edge_betweenness) summed over the given
    sources, each source-target pair counted once per direction; callers
    halve for undirected totals.
    """
    node_bt = np.zeros(n)
    edge_bt: dict[tuple[int, int], float] = {}
    for s in sources:
        dist = np.full(n, -1, dtype=np.int64)
        sigma = np.zeros(n)
        dist[s] = 0
        sigma[s] = 1.0
        order = [s]
        queue = deque([s])
        preds: list[list[int]] = [[] for _ in range(n)]
        while queue:
            u = queue.popleft()
            for idx in range(indptr[u], indptr[u + 1]):
                v = int(indices[idx])
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
                    order.append(v)
                if dist[v] == dist[u] + 1:
                    sigma[v] += sigma[u]
                    preds[v].append(u)
        delta = np.zeros(n)
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                c = sigma[v] * coeff
                pair = (v, w) if v < w else (w, v)
                edge_bt[pair] = edge_bt.get(pair, 0.0) + c
                delta[v] += c
            if w != s:
                node_bt[w] += delta[w]
    return node_bt, edge_bt


def edge_betweenness_bridges(
    graph: WeightedGraph,
    partition: dict[str, int],
    n: int = 100,
    seed: int = DEFAULT_SEED,
    sample_size: int = DEFAULT_PATH_SAMPLE,
    max_exact_nodes: int = EXACT_BETWEENNESS_MAX_NODES,
) -> dict:
    """Top cross-community edges by unweighted edge betweenness.

    Exact all-sources accumulation up to max_exact_nodes nodes; larger
    graphs fall back to a seeded source sample with values scaled to the
    full-source estimate, and the report says so.
    """
    keys, indptr, indices = _csr(graph)
    num = len(keys)
    if num == 0:
        return {"edges": [], "by_community_pair": [], "exact": True}
    exact = num <= max_exact_nodes
    if exact:
        sources = range(num)
        scale = 0.5
    else:
        rng = random.Random(seed)
        sources = sorted(rng.sample(range(num), min(sample_size, num)))
        scale = 0.5 * num / len(sources)

    _, edge_bt = _brandes(indptr, indices, num, sources)

    rows = []
    for (i, j), value in edge_bt.items():
        a, b = keys[i], keys[j]
        ca, cb = partition.get(a), partition.get(b)
        if ca is None or cb is None or ca == cb:
            continue
        lo, hi = sorted((ca, cb))
        rows.append(
            {
                "a": a,
                "b": b,
                "betweenness": value * scale,
                "weight": graph.weight(a, b),
                "community_a": lo,
                "community_b": hi,
            }
        )
    rows.sort(key=lambda r: (-r["betweenness"], r["a"], r["b"]))
    rows = rows[:n]

    by_pair: dict[tuple[int, int], dict] = {}
    for row in rows:
        pair = (row["community_a"], row["community_b"])
        agg = by_pair.setdefault(
            pair, {"community_a": pair[0], "community_b": pair[1], "count": 0, "total_betweenness": 0.0}
        )
        agg["count"] += 1
        agg["total_betweenness"] += row["betweenness"]
    pair_rows = sorted(
        by_pair.values(), key=lambda r: (-r["total_betweenness"], r["community_a"], r["community_b"])
    )
    report = {"edges": rows, "by_community_pair": pair_rows, "exact": exact}
    if not exact:
        report["sample_size"] = len(list(sources))
        report["seed"] = seed
    return report


def pagerank(
    graph: WeightedGraph,
    damping: float = 0.85,
    tol: float = 1e-10,
    weighted: bool = True,
    max_iter: int = 1000,
) -> dict[str, float]:
    """Power-iteration PageRank; dangling mass is spread uniformly."""
    keys, indptr, indices, weights = graph.index_arrays()
    n = len(keys)
    if n == 0:
        return {}
    w = weights if weighted else np.ones_like(weights)
    out_sum = np.zeros(n)
    for u in range(n):
        out_sum[u] = w[indptr[u]:indptr[u + 1]].sum()
    dangling = out_sum == 0

    rank = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = np.zeros(n)
        for u in range(n):
            if dangling[u]:
                continue
            share = rank[u] / out_sum[u]
            span = slice(indptr[u], indptr[u + 1])
            np.add.at(nxt, indices[span], share * w[span])
        nxt = damping * nxt + (damping * rank[dangling].sum() + (1.0 - damping)) / n
        if float(np.abs(nxt - rank).sum()) < tol:
            rank = nxt
            break
        rank = nxt
    return {key: float(rank[i]) for i, key in enumerate(keys)}


def _loglog_slope(values: Counter) -> float | None:
    """Least-squares slope of ln(frequency) on ln(value), values >= 1."""
    xs, ys = [], []
    for value in sorted(values):
        freq = values[value]
        if value >= 1 and freq >= 1:
            xs.append(math.log(value))
            ys.append(math.log(freq))
    if len(set(xs)) < 2:
        return None
    x = np.asarray(xs)
    y = np.asarray(ys)
    slope = float(((x - x.mean()) * (y - y.mean())).sum() / ((x - x.mean()) ** 2).sum())
    return slope


def network_diagnostics(
    graph: WeightedGraph,
    sample_size: int = DEFAULT_PATH_SAMPLE,
    seed: int = DEFAULT_SEED,
    top_n: int = 50,
) -> dict:
    """Degree structure, sampled path lengths, and centrality agreement.

    Centralities: degree, strength, citations, node betweenness, weighted
    and unweighted PageRank. The report carries their Kendall-tau matrix
    and the combined rank (mean rank over strength, betweenness, weighted
    PageRank), plus the top rows for display.
    """
    keys, indptr, indices = _csr(graph)
    n = len(keys)
    if n == 0:
        raise ValueError("diagnostics need a non-empty graph")

    degree = np.array([graph.degree(k) for k in keys], dtype=np.float64)
    strength = np.array([graph.strength(k) for k in keys])
    citations = np.array(
        [float(graph.node_attrs.get(k, {}).get("citations", 0)) for k in keys]
    )

    histograms = {
        "degree": _hist(degree),
        "strength": _hist(strength),
        "citations": _hist(citations),
    }
    slopes = {
        "degree": _loglog_slope(Counter(degree.tolist())),
        "strength": _loglog_slope(Counter(strength.tolist())),
        "citations": _loglog_slope(Counter(citations.tolist())),
    }

    components = graph.connected_components()
    lcc = sorted(components[0])
    lcc_idx = [i for i, k in enumerate(keys) if k in set(lcc)]
    rng = random.Random(seed)
    if len(lcc_idx) > sample_size:
        sources = sorted(rng.sample(lcc_idx, sample_size))
    else:
        sources = lcc_idx
    path_counts: Counter = Counter()
    total = 0
    total_len = 0
    for s in sources:
        dist = _bfs_from_index(indptr, indices, n, s)
        for d in dist:
            if d > 0:
                path_counts[int(d)] += 1
                total += 1
                total_len += int(d)
    mean_path = total_len / total if total else 0.0

    node_bt_raw, _ = _brandes(indptr, indices, n, range(n))
    node_bt = node_bt_raw * 0.5
    pr_w = pagerank(graph, weighted=True)
    pr_u = pagerank(graph, weighted=False)
    pr_w_arr = np.array([pr_w[k] for k in keys])
    pr_u_arr = np.array([pr_u[k] for k in keys])

    metrics = {
        "degree": degree,
        "strength": strength,
        "citations": citations,
        "betweenness": node_bt,
        "pagerank_weighted": pr_w_arr,
        "pagerank_unweighted": pr_u_arr,
    }
    names = list(metrics)
    matrix = []
    for a in names:
        row = []
        for b in names:
            if n < 2:
                row.append(1.0 if a == b else 0.0)
                continue
            tau = sps.kendalltau(metrics[a], metrics[b]).statistic
            row.append(float(tau) if not math.isnan(tau) else 0.0)
        matrix.append(row)

    rank_parts = [
        sps.rankdata(-strength, method="average"),
        sps.rankdata(-node_bt, method="average"),
        sps.rankdata(-pr_w_arr, method="average"),
    ]
    combined = np.mean(rank_parts, axis=0)
    order = np.lexsort((np.array(keys), combined))
    top_rows = [
        {
            "key": keys[i],
            "combined_rank": float(combined[i]),
            "strength": float(strength[i]),
            "betweenness": float(node_bt[i]),
            "pagerank_weighted": float(pr_w_arr[i]),
        }
        for i in order[:top_n]
    ]

    return {
        "nodes": n,
        "edges": graph.edge_count(),
        "lcc_size": len(lcc),
        "histograms": histograms,
        "loglog_slopes": slopes,
        "paths": {
            "mean": mean_path,
            "distribution": {str(d): path_counts[d] for d in sorted(path_counts)},
            "sample_size": len(sources),
            "seed": seed,
        },
        "kendall_tau": {"metrics": names, "matrix": matrix},
        "combined_rank_top": top_rows,
    }


def _bfs_from_index(indptr, indices, n, s) -> np.ndarray:
    dist = np.full(n, -1, dtype=np.int64)
    dist[s] = 0
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for idx in range(indptr[u], indptr[u + 1]):
            v = int(indices[idx])
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist[dist > 0]


def _hist(values: np.ndarray) -> dict[str, int]:
    counts = Counter(values.tolist())
    return {_fmt_value(v): int(c) for v, c in sorted(counts.items())}


def _fmt_value(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))
