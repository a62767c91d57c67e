"""TF-IDF keyword labels and exemplar authors per community."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .leiden import Partition

# 50 fixed function words plus venue boilerplate tokens.
STOPWORDS = frozenset(
    """a an the and or but of in on at to for from by with without into onto
    over under between through during before after above below up down out
    off is are was were be been being as that this these those its it their
    we our can via""".split()
) | frozenset({"paper", "study", "analysis"})


@dataclass
class CommunityLabel:
    community_id: int
    top_terms: list[tuple[str, float]]
    exemplar_authors: list[str]


def _title_terms(title_norm: str) -> list[str]:
    tokens = [t for t in title_norm.split() if t not in STOPWORDS]
    terms = list(tokens)
    terms.extend(f"{a} {b}" for a, b in zip(tokens, tokens[1:]))
    return terms


def keyword_labels(
    partition: Partition, papers, top_n: int = 6, exemplar_n: int = 5
) -> dict[int, CommunityLabel]:
    """Label each community with its top TF-IDF title terms.

    A paper counts toward every community that contains one of its authors.
    Term score = (frequency within the community's titles) * ln(number of
    communities / number of communities containing the term). Ties break
    lexicographically. With a single community every IDF is ln(1) = 0, so
    ranking falls back to raw frequency. Exemplars are the community's
    top-5 authors by paper count, ties by key order.
    """
    communities = partition.communities()
    n_comm = len(communities)

    member_of: dict[str, int] = partition.assignment
    tf: dict[int, Counter] = {cid: Counter() for cid in communities}
    author_papers: dict[int, Counter] = {cid: Counter() for cid in communities}

    for paper in papers:
        cids = set()
        for key in set(paper.authors):
            cid = member_of.get(key)
            if cid is not None:
                cids.add(cid)
                author_papers[cid][key] += 1
        if not cids:
            continue
        terms = _title_terms(paper.title_norm)
        for cid in cids:
            tf[cid].update(terms)

    df: Counter = Counter()
    for cid in communities:
        df.update(set(tf[cid]))

    labels: dict[int, CommunityLabel] = {}
    for cid in sorted(communities):
        counts = tf[cid]
        if n_comm == 1:
            scored = [(term, float(freq)) for term, freq in counts.items()]
        else:
            scored = [
                (term, freq * math.log(n_comm / df[term])) for term, freq in counts.items()
            ]
        scored.sort(key=lambda ts: (-ts[1], ts[0]))
        members = author_papers[cid]
        exemplars = sorted(members, key=lambda k: (-members[k], k))[:exemplar_n]
        labels[cid] = CommunityLabel(
            community_id=cid,
            top_terms=scored[:top_n],
            exemplar_authors=exemplars,
        )
    return labels
