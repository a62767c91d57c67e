"""Train/holdout split with train-only refit of every upstream artifact."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from bibatlas.embedding.hybrid import (
    TrivialCentroidError,
    author_specter_centroid,
)
from bibatlas.embedding.whitening import (
    WhiteningModel,
    apply_whitening_matrix,
    fit_whitening,
)
from bibatlas.graphs.build import build_coauthor
from bibatlas.graphs.core import WeightedGraph


@dataclass
class TemporalSplit:
    """Everything candidate generation may touch, rebuilt on train data.

    Holdout papers are carried only for realized-pair marking after
    candidates are frozen; nothing else may read them.
    """

    cutoff_year: int
    horizon: int
    train_paper_ids: list[str]
    holdout_paper_ids: list[str]
    whitening_digest: str
    train_graph_digest: str
    whitening: WhiteningModel
    centroids: dict[str, np.ndarray]
    train_graph: WeightedGraph
    eligible: list[str]
    train_paper_counts: dict[str, int]
    train_venues: dict[str, set[str]]
    holdout_pairs: set[tuple[str, str]]
    counts: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "cutoff_year": self.cutoff_year,
            "horizon": self.horizon,
            "train_papers": len(self.train_paper_ids),
            "holdout_papers": len(self.holdout_paper_ids),
            "whitening_digest": self.whitening_digest,
            "train_graph_digest": self.train_graph_digest,
            "eligible_authors": len(self.eligible),
            "counts": dict(self.counts),
        }


def _holdout_coauthor_pairs(papers) -> set[tuple[str, str]]:
    pairs: set[tuple[str, str]] = set()
    for paper in papers:
        members = sorted(set(paper.authors))
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                pairs.add((members[i], members[j]))
    return pairs


def make_split(
    papers,
    paper_vectors: dict[str, np.ndarray],
    cutoff_year: int = 2019,
    horizon: int = 2025,
    min_train_papers: int = 2,
    graph_min_papers: int = 2,
) -> TemporalSplit:
    """Split at cutoff_year and refit whitening, centroids, and the
    coauthor graph on the train side only.

    Eligible authors have at least min_train_papers train papers and a
    non-trivial train-period centroid. Papers dated past the horizon are
    discarded entirely.
    """
    train = [p for p in papers if p.year <= cutoff_year]
    holdout = [p for p in papers if cutoff_year < p.year <= horizon]
    if not train:
        raise ValueError(f"no papers at or before cutoff year {cutoff_year}")
    if not holdout:
        raise ValueError(
            f"no papers in holdout window [{cutoff_year + 1}, {horizon}]"
        )

    train_vectors = {
        p.paper_id: paper_vectors[p.paper_id]
        for p in train
        if p.paper_id in paper_vectors
    }
    model = fit_whitening(train_vectors)
    vec_ids = sorted(train_vectors)
    mat = apply_whitening_matrix(
        np.asarray([train_vectors[i] for i in vec_ids], dtype=np.float64), model
    )
    whitened = {pid: mat[i] for i, pid in enumerate(vec_ids)}

    paper_counts: Counter = Counter()
    venues: dict[str, set[str]] = {}
    by_author: dict[str, list] = {}
    for paper in train:
        for key in set(paper.authors):
            paper_counts[key] += 1
            venues.setdefault(key, set()).add(paper.venue_slug)
            by_author.setdefault(key, []).append(paper)

    graph = build_coauthor(train, min_papers=graph_min_papers)

    centroids: dict[str, np.ndarray] = {}
    eligible: list[str] = []
    n_trivial = 0
    passed = [k for k in sorted(paper_counts) if paper_counts[k] >= min_train_papers]
    for key in passed:
        contributions = [
            (whitened[p.paper_id], p.citations)
            for p in by_author[key]
            if p.paper_id in whitened
        ]
        if not contributions:
            n_trivial += 1
            continue
        try:
            centroids[key] = author_specter_centroid(contributions)
        except TrivialCentroidError:
            n_trivial += 1
            continue
        eligible.append(key)

    split = TemporalSplit(
        cutoff_year=cutoff_year,
        horizon=horizon,
        train_paper_ids=sorted(p.paper_id for p in train),
        holdout_paper_ids=sorted(p.paper_id for p in holdout),
        whitening_digest=model.digest(),
        train_graph_digest=graph.digest(),
        whitening=model,
        centroids=centroids,
        train_graph=graph,
        eligible=eligible,
        train_paper_counts=dict(paper_counts),
        train_venues=venues,
        holdout_pairs=_holdout_coauthor_pairs(holdout),
        counts={
            "train_papers": len(train),
            "holdout_papers": len(holdout),
            "train_papers_with_vectors": len(train_vectors),
            "authors_min_papers": len(passed),
            "eligible_authors": len(eligible),
            "centroid_excluded": n_trivial,
        },
    )
    return split
