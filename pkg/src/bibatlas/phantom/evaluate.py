"""Distance-gated candidate generation and the precision/lift report.

Candidate scans, baseline draws, and aggregation are all deterministic
given (split, seed): anchors are processed in sorted-key order, cosine
ties break by partner key, and every baseline draw comes from its own
numpy SeedSequence stream spawned as (baseline index, anchor rank) so the
result is independent of evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from bibatlas.graphs.metrics import bfs_distances, geodesic_distance
from bibatlas.ioutil import canonical_json, sha256_text
from bibatlas.phantom.split import TemporalSplit

BASELINES = ("random", "popularity", "same_venue")
TAG_CAP = 4


@dataclass
class PhantomCandidate:
    anchor: str
    partner: str
    cosine: float
    distance_tag: str
    realized: bool = False

    def to_dict(self) -> dict:
        return {
            "anchor": self.anchor,
            "partner": self.partner,
            "cosine": self.cosine,
            "distance_tag": self.distance_tag,
            "realized": self.realized,
        }


def _distance_tag(split: TemporalSplit, anchor: str, partner: str) -> str:
    graph = split.train_graph
    if anchor not in graph or partner not in graph:
        return f">={TAG_CAP}"
    d = geodesic_distance(graph, anchor, partner, cap=TAG_CAP)
    return str(d) if d is not None else f">={TAG_CAP}"


def _passes_gate(split: TemporalSplit, anchor: str, partner: str, min_distance: int) -> bool:
    graph = split.train_graph
    if anchor not in graph or partner not in graph:
        return True
    return geodesic_distance(graph, anchor, partner, cap=min_distance) is None


def _gated_scan(
    split: TemporalSplit,
    keys: list[str],
    mat: np.ndarray,
    idx: int,
    k: int,
    min_distance: int,
) -> list[PhantomCandidate]:
    anchor = keys[idx]
    row = mat @ mat[idx]
    row[idx] = -np.inf
    order = np.lexsort((np.arange(len(keys)), -row))
    kept: list[PhantomCandidate] = []
    for j in order:
        if j == idx:
            continue
        partner = keys[j]
        if not _passes_gate(split, anchor, partner, min_distance):
            continue
        kept.append(
            PhantomCandidate(
                anchor=anchor,
                partner=partner,
                cosine=float(row[j]),
                distance_tag=_distance_tag(split, anchor, partner),
            )
        )
        if len(kept) == k:
            break
    return kept


def phantom_partners(
    split: TemporalSplit, anchor: str, k: int, min_distance: int = 3
) -> list[PhantomCandidate]:
    """Top-k eligible authors by train-centroid cosine, skipping everyone
    closer than min_distance hops in the train coauthor graph.

    The scan walks the full cosine-descending order (ties by key) and
    keeps gated survivors until k are found; anchors with fewer gated
    peers return what exists.
    """
    if anchor not in split.centroids:
        raise KeyError(f"anchor {anchor!r} is not eligible")
    keys = list(split.eligible)
    mat = np.asarray([split.centroids[key] for key in keys], dtype=np.float64)
    return _gated_scan(split, keys, mat, keys.index(anchor), k, min_distance)


def _method_rows(
    per_anchor: list[list[tuple[str, str]]],
    k_list: list[int],
    realized: set[tuple[str, str]],
) -> dict[str, dict]:
    """Per-K hit/precision rows for one method.

    The primary micro-precision divides deduplicated realized pairs by the
    per-anchor prediction total; the unordered variant deduplicates the
    denominator too. Macro averages per-anchor hit rates over anchors that
    produced at least one candidate.
    """
    rows: dict[str, dict] = {}
    for k in k_list:
        hit_pairs: set[tuple[str, str]] = set()
        all_pairs: set[tuple[str, str]] = set()
        predictions = 0
        macro_terms: list[float] = []
        for cands in per_anchor:
            top = cands[:k]
            if not top:
                continue
            predictions += len(top)
            anchor_hits = 0
            for a, b in top:
                pair = (a, b) if a <= b else (b, a)
                all_pairs.add(pair)
                if pair in realized:
                    hit_pairs.add(pair)
                    anchor_hits += 1
            macro_terms.append(anchor_hits / len(top))
        hits = len(hit_pairs)
        rows[str(k)] = {
            "hits": hits,
            "predictions": predictions,
            "micro_precision": hits / predictions if predictions else 0.0,
            "predictions_unordered": len(all_pairs),
            "micro_precision_unordered": hits / len(all_pairs) if all_pairs else 0.0,
            "macro_precision": (
                sum(macro_terms) / len(macro_terms) if macro_terms else 0.0
            ),
        }
    return rows


def _baseline_draws(
    split: TemporalSplit,
    keys: list[str],
    k_max: int,
    seed: int,
) -> tuple[dict[str, list[list[tuple[str, str]]]], dict[str, int]]:
    """One ordered without-replacement sample of size min(k_max, pool) per
    (baseline, anchor); per-K results are prefixes of that draw.

    All baselines exclude near-train coauthors (hop distance <= 2). An
    anchor whose pool is empty is skipped for that baseline and counted.
    """
    graph = split.train_graph
    draws: dict[str, list[list[tuple[str, str]]]] = {b: [] for b in BASELINES}
    skipped: dict[str, int] = {b: 0 for b in BASELINES}
    for rank, anchor in enumerate(keys):
        near = (
            set(bfs_distances(graph, anchor, cap=3)) if anchor in graph else {anchor}
        )
        pool = [key for key in keys if key != anchor and key not in near]
        venues = split.train_venues.get(anchor, set())
        venue_pool = [
            key for key in pool if split.train_venues.get(key, set()) & venues
        ]
        pools = {
            "random": (pool, None),
            "popularity": (
                pool,
                np.asarray(
                    [split.train_paper_counts[key] for key in pool], dtype=np.float64
                )
                if pool
                else None,
            ),
            "same_venue": (venue_pool, None),
        }
        for b_index, baseline in enumerate(BASELINES):
            members, weights = pools[baseline]
            if not members:
                skipped[baseline] += 1
                draws[baseline].append([])
                continue
            rng = np.random.Generator(
                np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(b_index, rank)))
            )
            size = min(k_max, len(members))
            if weights is not None:
                p = weights / weights.sum()
                chosen = rng.choice(len(members), size=size, replace=False, p=p)
            else:
                chosen = rng.choice(len(members), size=size, replace=False)
            draws[baseline].append([(anchor, members[int(j)]) for j in chosen])
    return draws, skipped


def _calibration(
    per_anchor: list[list[PhantomCandidate]], k: int, buckets: int = 10
) -> dict:
    """Equal-frequency cosine buckets over the top-k candidate set with
    per-bucket realized rates, lowest cosine first."""
    entries = [
        (c.cosine, c.anchor, c.partner, c.realized)
        for cands in per_anchor
        for c in cands[:k]
    ]
    entries.sort(key=lambda t: (t[0], t[1], t[2]))
    n = len(entries)
    rows = []
    for b in range(buckets):
        lo = (b * n) // buckets
        hi = ((b + 1) * n) // buckets
        chunk = entries[lo:hi]
        if chunk:
            hits = sum(1 for e in chunk if e[3])
            rows.append(
                {
                    "bucket": b,
                    "count": len(chunk),
                    "hits": hits,
                    "rate": hits / len(chunk),
                    "cosine_lo": chunk[0][0],
                    "cosine_hi": chunk[-1][0],
                }
            )
        else:
            rows.append(
                {
                    "bucket": b,
                    "count": 0,
                    "hits": 0,
                    "rate": None,
                    "cosine_lo": None,
                    "cosine_hi": None,
                }
            )
    top = rows[-1]["rate"]
    bottom = rows[0]["rate"]
    gradient = top / bottom if top is not None and bottom else None
    return {"k": k, "buckets": rows, "gradient": gradient}


def evaluate(
    split: TemporalSplit,
    k_list: tuple[int, ...] = (5, 10, 20),
    min_distance: int = 3,
    seed: int = 1337,
) -> dict:
    """Score gated candidates and the three null baselines per K.

    Candidates are frozen (and digested) before any holdout pair is read;
    a pair counts as a hit when its two authors coauthor at least one
    holdout paper. Lift on a baseline row is the phantom micro-precision
    over that baseline's, absent when the baseline scored zero.
    """
    ks = sorted(set(int(k) for k in k_list))
    if not ks or ks[0] < 1:
        raise ValueError("k_list must contain positive integers")
    k_max = ks[-1]
    keys = list(split.eligible)
    mat = np.asarray(
        [split.centroids[key] for key in keys], dtype=np.float64
    ).reshape(len(keys), -1)

    per_anchor: list[list[PhantomCandidate]] = [
        _gated_scan(split, keys, mat, idx, k_max, min_distance)
        for idx in range(len(keys))
    ]
    candidates_digest = sha256_text(
        canonical_json(
            [
                [c.anchor, c.partner, repr(c.cosine), c.distance_tag]
                for cands in per_anchor
                for c in cands
            ]
        )
    )

    realized = split.holdout_pairs
    for cands in per_anchor:
        for c in cands:
            pair = (c.anchor, c.partner) if c.anchor <= c.partner else (c.partner, c.anchor)
            c.realized = pair in realized

    phantom_pairs = [[(c.anchor, c.partner) for c in cands] for cands in per_anchor]
    methods: dict[str, dict] = {
        "phantom": {"per_k": _method_rows(phantom_pairs, ks, realized)}
    }

    draws, skipped = _baseline_draws(split, keys, k_max, seed)
    for baseline in BASELINES:
        methods[baseline] = {
            "per_k": _method_rows(draws[baseline], ks, realized),
            "skipped_anchors": skipped[baseline],
        }

    for k in ks:
        phantom_micro = methods["phantom"]["per_k"][str(k)]["micro_precision"]
        for baseline in BASELINES:
            row = methods[baseline]["per_k"][str(k)]
            row["lift"] = (
                phantom_micro / row["micro_precision"]
                if row["micro_precision"] > 0
                else None
            )

    realized_rows = sorted(
        (c for cands in per_anchor for c in cands if c.realized),
        key=lambda c: (-c.cosine, c.anchor, c.partner),
    )
    return {
        "schema": "phantom-report-v1",
        "cutoff_year": split.cutoff_year,
        "horizon": split.horizon,
        "gate_min_distance": min_distance,
        "seed": seed,
        "k_list": ks,
        "eligible_authors": len(keys),
        "split_counts": dict(split.counts),
        "digests": {
            "whitening": split.whitening_digest,
            "train_graph": split.train_graph_digest,
            "candidates": candidates_digest,
            "holdout_papers": sha256_text(canonical_json(split.holdout_paper_ids)),
        },
        "methods": methods,
        "calibration": _calibration(per_anchor, k_max),
        "realized_pairs": [c.to_dict() for c in realized_rows],
    }
