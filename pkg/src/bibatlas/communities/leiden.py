"""Leiden community detection under the RB-configuration quality.

Quality of a partition: Q = sum_c [ e_c/(2m) - gamma (K_c/(2m))^2 ], where
e_c is twice the intra-community edge weight, K_c the total weighted degree
of community c, and m the total edge weight. The optimizer runs the three
Leiden phases to a fixed point: queue-driven local moving, refinement inside
each community (deterministic argmax variant of the merge step), and graph
aggregation that restarts local moving from the refined sub-communities.
A final components pass splits any internally disconnected community, which
for gamma > 0 can only increase Q and enforces the connectivity guarantee.

The greedy phases can park small graphs in poor local optima, so the result
is the quality argmax over a candidate pool: the multi-level result, the
connected-components partition (always at least as good as one community
per graph), and, below a size gate, a batch of seeded random-improving
climbs that pick uniformly among positive-gain single-node moves instead of
the argmax move.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

from ..ioutil import read_json, write_json
from ..graphs.core import WeightedGraph


@dataclass
class Partition:
    assignment: dict[str, int]
    layer: str
    resolution: float
    seed: int
    quality: float
    misc_bucket: int | None = None
    meta: dict = field(default_factory=dict)

    def communities(self) -> dict[int, list[str]]:
        out: dict[int, list[str]] = {}
        for key in sorted(self.assignment):
            out.setdefault(self.assignment[key], []).append(key)
        return out

    def sizes(self) -> dict[int, int]:
        return {cid: len(members) for cid, members in self.communities().items()}

    def save(self, path: str | Path) -> None:
        keys = sorted(self.assignment)
        write_json(
            path,
            {
                "schema": "partition-v1",
                "provenance": {
                    "layer": self.layer,
                    "resolution": self.resolution,
                    "seed": self.seed,
                    "quality": self.quality,
                    **self.meta,
                },
                "misc_bucket": self.misc_bucket,
                "nodes": keys,
                "assignment": [self.assignment[k] for k in keys],
            },
        )

    @classmethod
    def load(cls, path: str | Path) -> "Partition":
        doc = read_json(path)
        if doc.get("schema") != "partition-v1":
            raise ValueError(f"{path}: unexpected partition schema")
        prov = doc["provenance"]
        meta = {k: v for k, v in prov.items() if k not in ("layer", "resolution", "seed", "quality")}
        return cls(
            assignment=dict(zip(doc["nodes"], doc["assignment"])),
            layer=prov["layer"],
            resolution=float(prov["resolution"]),
            seed=int(prov["seed"]),
            quality=float(prov["quality"]),
            misc_bucket=doc.get("misc_bucket"),
            meta=meta,
        )


class _Level:
    """One aggregation level: adjacency lists plus self-loop bookkeeping."""

    __slots__ = ("n", "adj", "self_w", "strength", "m")

    def __init__(self, n: int, adj: list[list[tuple[int, float]]], self_w: list[float]) -> None:
        self.n = n
        self.adj = adj
        self.self_w = self_w
        self.strength = [
            sum(w for _, w in adj[v]) + 2.0 * self_w[v] for v in range(n)
        ]
        self.m = sum(self.strength) / 2.0


def _level_from_graph(graph: WeightedGraph) -> tuple[_Level, list[str]]:
    keys = sorted(graph.nodes)
    pos = {k: i for i, k in enumerate(keys)}
    adj: list[list[tuple[int, float]]] = [[] for _ in keys]
    for a, b, w in graph.edges():
        ia, ib = pos[a], pos[b]
        adj[ia].append((ib, w))
        adj[ib].append((ia, w))
    for lst in adj:
        lst.sort()
    return _Level(len(keys), adj, [0.0] * len(keys)), keys


def _quality(level: _Level, comm: list[int], gamma: float) -> float:
    m = level.m
    if m == 0:
        return 0.0
    n_comm = max(comm) + 1 if comm else 0
    e = [0.0] * n_comm
    big_k = [0.0] * n_comm
    for v in range(level.n):
        c = comm[v]
        big_k[c] += level.strength[v]
        e[c] += 2.0 * level.self_w[v]
        for u, w in level.adj[v]:
            if comm[u] == c:
                e[c] += w  # each intra edge hit from both ends -> x2 total
    two_m = 2.0 * m
    return sum(e[c] / two_m - gamma * (big_k[c] / two_m) ** 2 for c in range(n_comm))


def _dense(comm: list[int]) -> list[int]:
    remap: dict[int, int] = {}
    out = []
    for c in comm:
        if c not in remap:
            remap[c] = len(remap)
        out.append(remap[c])
    return out


def _local_move(level: _Level, comm: list[int], gamma: float, rng: random.Random) -> tuple[list[int], int]:
    """Queue-driven local moving; considers neighbor communities plus an
    empty community, breaking score ties toward staying put."""
    n = level.n
    m = level.m
    if m == 0:
        return comm, 0
    two_m = 2.0 * m
    n_comm = (max(comm) + 1) if comm else 0
    big_k = [0.0] * n_comm
    for v in range(n):
        big_k[comm[v]] += level.strength[v]

    order = list(range(n))
    rng.shuffle(order)
    queue = deque(order)
    in_queue = [True] * n
    moves = 0

    while queue:
        v = queue.popleft()
        in_queue[v] = False
        cur = comm[v]
        k_v = level.strength[v]
        w_to: dict[int, float] = {}
        for u, w in level.adj[v]:
            c = comm[u]
            w_to[c] = w_to.get(c, 0.0) + w

        big_k[cur] -= k_v
        best_c = cur
        best_score = w_to.get(cur, 0.0) - gamma * k_v * big_k[cur] / two_m
        for c in sorted(w_to):
            if c == cur:
                continue
            score = w_to[c] - gamma * k_v * big_k[c] / two_m
            if score > best_score:
                best_c, best_score = c, score
        if 0.0 > best_score:  # moving to a fresh empty community
            best_c, best_score = n_comm, 0.0

        if best_c == cur:
            big_k[cur] += k_v
            continue
        if best_c == n_comm:
            big_k.append(0.0)
            n_comm += 1
        comm[v] = best_c
        big_k[best_c] += k_v
        moves += 1
        for u, _ in level.adj[v]:
            if comm[u] != best_c and not in_queue[u]:
                queue.append(u)
                in_queue[u] = True

    return _dense(comm), moves


def _refine(level: _Level, comm: list[int], gamma: float, rng: random.Random) -> list[int]:
    """Singleton merge pass inside each community (theta -> 0 variant).

    A node may merge only into a sub-community of its own community, only
    when both are well-connected within it, choosing the positive-gain
    argmax. Merging only along edges keeps sub-communities connected.
    """
    n = level.n
    m = level.m
    ref = list(range(n))
    if m == 0:
        return ref
    two_m = 2.0 * m

    comm_k = {}
    for v in range(n):
        comm_k[comm[v]] = comm_k.get(comm[v], 0.0) + level.strength[v]

    # ext_node[v]: weight from v to the rest of its community.
    ext_node = [0.0] * n
    for v in range(n):
        ext_node[v] = sum(w for u, w in level.adj[v] if comm[u] == comm[v])

    ref_k = list(level.strength)
    ref_ext = list(ext_node)
    ref_size = [1] * n

    order = list(range(n))
    rng.shuffle(order)
    for v in order:
        if ref_size[ref[v]] > 1:
            continue
        c = comm[v]
        k_c = comm_k[c]
        k_v = level.strength[v]
        if ext_node[v] < gamma * k_v * (k_c - k_v) / two_m:
            continue
        w_to: dict[int, float] = {}
        for u, w in level.adj[v]:
            if comm[u] == c and ref[u] != ref[v]:
                w_to[ref[u]] = w_to.get(ref[u], 0.0) + w
        best_d = None
        best_gain = 0.0
        for d in sorted(w_to):
            if ref_ext[d] < gamma * ref_k[d] * (k_c - ref_k[d]) / two_m:
                continue
            gain = w_to[d] - gamma * k_v * ref_k[d] / two_m
            if gain > best_gain:
                best_d, best_gain = d, gain
        if best_d is None:
            continue
        old = ref[v]
        ref_ext[best_d] = ref_ext[best_d] + ext_node[v] - 2.0 * w_to[best_d]
        ref_k[best_d] += k_v
        ref_size[best_d] += 1
        ref_size[old] = 0
        ref[v] = best_d

    return ref


def _aggregate(
    level: _Level, ref: list[int], comm: list[int]
) -> tuple[_Level, list[int], list[int]]:
    """Collapse refined sub-communities into nodes; the induced partition
    keeps each aggregate node in its pre-refinement community."""
    idx: dict[int, int] = {}
    node_of: list[int] = [0] * level.n
    for v in range(level.n):
        r = ref[v]
        if r not in idx:
            idx[r] = len(idx)
        node_of[v] = idx[r]
    n2 = len(idx)

    self2 = [0.0] * n2
    pair_w: dict[tuple[int, int], float] = {}
    comm2 = [0] * n2
    for v in range(level.n):
        nv = node_of[v]
        self2[nv] += level.self_w[v]
        comm2[nv] = comm[v]
        for u, w in level.adj[v]:
            if u <= v:
                continue
            nu = node_of[u]
            if nu == nv:
                self2[nv] += w
            else:
                pair = (nv, nu) if nv < nu else (nu, nv)
                pair_w[pair] = pair_w.get(pair, 0.0) + w

    adj2: list[list[tuple[int, float]]] = [[] for _ in range(n2)]
    for (a, b), w in sorted(pair_w.items()):
        adj2[a].append((b, w))
        adj2[b].append((a, w))
    for lst in adj2:
        lst.sort()

    return _Level(n2, adj2, self2), _dense(comm2), node_of


def _random_improving_climb(level: _Level, gamma: float, rng: random.Random) -> list[int]:
    """Hill climb from singletons choosing a RANDOM strictly improving move.

    Candidate moves take one node into a neighbor's community or a fresh
    empty one. Sampling instead of argmax explores basins the greedy pass
    cannot enter; each accepted move raises Q, so the climb terminates.
    """
    n = level.n
    comm = list(range(n))
    if level.m == 0:
        return comm
    two_m = 2.0 * level.m
    big_k = list(level.strength)
    while True:
        moves: list[tuple[int, int, float]] = []
        for v in range(n):
            cur = comm[v]
            k_v = level.strength[v]
            w_to: dict[int, float] = {}
            for u, w in level.adj[v]:
                c = comm[u]
                w_to[c] = w_to.get(c, 0.0) + w
            base = w_to.get(cur, 0.0) - gamma * k_v * (big_k[cur] - k_v) / two_m
            for c in sorted(w_to):
                if c == cur:
                    continue
                gain = (w_to[c] - gamma * k_v * big_k[c] / two_m) - base
                if gain > 1e-14:
                    moves.append((v, c, gain))
            if -base > 1e-14:
                moves.append((v, -1, -base))
        if not moves:
            return comm
        v, c, _ = moves[rng.randrange(len(moves))]
        if c == -1:
            c = len(big_k)
            big_k.append(0.0)
        big_k[comm[v]] -= level.strength[v]
        big_k[c] += level.strength[v]
        comm[v] = c


def _components_partition(level: _Level) -> list[int]:
    """One community per connected component of the level graph."""
    comm = [-1] * level.n
    next_id = 0
    for start in range(level.n):
        if comm[start] >= 0:
            continue
        comm[start] = next_id
        stack = [start]
        while stack:
            u = stack.pop()
            for v, _ in level.adj[u]:
                if comm[v] < 0:
                    comm[v] = next_id
                    stack.append(v)
        next_id += 1
    return comm


def _split_disconnected(level: _Level, comm: list[int]) -> list[int]:
    """Split any community that is not internally connected. For gamma > 0
    separating components of a community strictly increases Q."""
    members: dict[int, list[int]] = {}
    for v in range(level.n):
        members.setdefault(comm[v], []).append(v)
    next_id = 0
    out = [0] * level.n
    for c in sorted(members):
        todo = set(members[c])
        while todo:
            start = min(todo)
            seen = {start}
            stack = [start]
            while stack:
                u = stack.pop()
                for x, _ in level.adj[u]:
                    if x in todo and x not in seen:
                        seen.add(x)
                        stack.append(x)
            for v in seen:
                out[v] = next_id
            next_id += 1
            todo -= seen
    return out


def leiden(
    graph: WeightedGraph,
    resolution: float = 1.0,
    seed: int = 42,
    max_levels: int = 100,
    polish_climbs: int = 64,
    polish_max_nodes: int = 128,
) -> Partition:
    """Run Leiden to a fixed point and return a dense, connected partition.

    Deterministic for a fixed (graph digest, resolution, seed): all node
    orders derive from sorted keys shuffled by one seeded RNG. Community
    ids are dense from 0, ordered by (size desc, smallest member key).

    Graphs with at most polish_max_nodes nodes additionally get
    polish_climbs random-improving climbs; the best candidate by quality
    wins. Larger graphs only compare against the components partition,
    which costs one traversal.
    """
    if len(graph) == 0:
        raise ValueError("leiden needs a non-empty graph")
    if resolution <= 0:
        raise ValueError("resolution must be positive")

    level, keys = _level_from_graph(graph)
    rng = random.Random(seed)
    comm = list(range(level.n))
    mapping = list(range(level.n))  # original node -> current level node
    quality_log: list[float] = []

    for _ in range(max_levels):
        comm, _moves = _local_move(level, comm, resolution, rng)
        quality_log.append(_quality(level, comm, resolution))
        n_comm = max(comm) + 1
        if n_comm == level.n:
            break
        ref = _refine(level, comm, resolution, rng)
        if len(set(ref)) == level.n:
            break
        level2, comm2, node_of = _aggregate(level, ref, comm)
        mapping = [node_of[mapping[i]] for i in range(len(mapping))]
        level, comm = level2, comm2

    comm = _split_disconnected(level, comm)
    flat = _dense([comm[mapping[i]] for i in range(len(keys))])

    base_level, _ = _level_from_graph(graph)
    best_q = _quality(base_level, flat, resolution)

    candidates = [_components_partition(base_level)]
    if base_level.n <= polish_max_nodes:
        candidates.extend(
            _random_improving_climb(base_level, resolution, rng)
            for _ in range(polish_climbs)
        )
    for cand in candidates:
        cand = _dense(_split_disconnected(base_level, cand))
        q = _quality(base_level, cand, resolution)
        if q > best_q:
            flat, best_q = cand, q

    final_q = best_q
    quality_log.append(final_q)

    # Relabel: big communities first, ties by smallest member key.
    groups: dict[int, list[int]] = {}
    for i, c in enumerate(flat):
        groups.setdefault(c, []).append(i)
    ordered = sorted(groups.values(), key=lambda g: (-len(g), keys[min(g)]))
    assignment: dict[str, int] = {}
    for new_id, group in enumerate(ordered):
        for i in group:
            assignment[keys[i]] = new_id

    return Partition(
        assignment=assignment,
        layer=graph.layer,
        resolution=resolution,
        seed=seed,
        quality=final_q,
        meta={"quality_log": quality_log, "graph_digest": graph.digest()},
    )


def rb_quality(graph: WeightedGraph, assignment: dict[str, int], resolution: float) -> float:
    """RB-configuration quality of an arbitrary assignment on this graph."""
    level, keys = _level_from_graph(graph)
    comm = _dense([assignment[k] for k in keys])
    return _quality(level, comm, resolution)


def merge_islands(
    partition: Partition, graph: WeightedGraph, min_size: int = 10
) -> Partition:
    """Move communities below min_size into one misc bucket.

    Mainland ids are recompacted (size desc, smallest member key); the misc
    bucket, when present, takes the next id after the mainland.
    """
    groups = partition.communities()
    mainland = [g for g in groups.values() if len(g) >= min_size]
    islands = [g for g in groups.values() if len(g) < min_size]
    mainland.sort(key=lambda g: (-len(g), min(g)))

    assignment: dict[str, int] = {}
    for new_id, group in enumerate(mainland):
        for key in group:
            assignment[key] = new_id
    misc_id = None
    if islands:
        misc_id = len(mainland)
        for group in islands:
            for key in group:
                assignment[key] = misc_id

    return Partition(
        assignment=assignment,
        layer=partition.layer,
        resolution=partition.resolution,
        seed=partition.seed,
        quality=partition.quality,
        misc_bucket=misc_id,
        meta={
            **partition.meta,
            "mainland_communities": len(mainland),
            "island_communities_merged": len(islands),
            "min_community_size": min_size,
        },
    )
