"""Two-pass record deduplication.

Pass 1 groups records by normalized DOI. Pass 2 merges DOI-less or
DOI-conflicting records when the normalized titles score above the fuzzy
threshold AND the years are identical AND at least one author surname
overlaps. Merging is transitive (union-find closure), so a record matching
two previously disjoint groups joins them into one paper.
"""

from __future__ import annotations

import logging
from collections import Counter, defaultdict

from .identity import resolve_author
from .models import PaperRecord, RawRecord, paper_surrogate_id
from .normalize import surname_of, token_set_ratio

log = logging.getLogger(__name__)

_SOURCE_PRIORITY = {"primary-index": 0, "doi-registry": 1, "ieee-backfill": 2}


class UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def _record_surnames(rec: RawRecord) -> set[str]:
    return {s for s in (surname_of(a.display_name) for a in rec.authors) if s}


def dedup(
    records: list[RawRecord],
    ratio_threshold: int = 95,
    min_surname_overlap: int = 1,
) -> tuple[list[PaperRecord], list[str]]:
    """Collapse raw records into papers.

    Returns (papers, record_to_paper) where record_to_paper[i] is the
    paper_id that records[i] ended up in. Output papers are sorted by
    (year, paper_id). Records with empty titles still dedup by DOI.
    """
    n = len(records)
    uf = UnionFind(n)

    # Pass 1: exact DOI identity.
    by_doi: dict[str, int] = {}
    for i, rec in enumerate(records):
        if rec.doi:
            first = by_doi.setdefault(rec.doi, i)
            if first != i:
                uf.union(first, i)

    # Pass 2: fuzzy closure, blocked on (year, surname) since both are
    # required for a merge anyway.
    titles = [rec.title_norm for rec in records]
    surnames = [_record_surnames(rec) for rec in records]
    blocks: dict[tuple[int, str], list[int]] = defaultdict(list)
    for i, rec in enumerate(records):
        for s in sorted(surnames[i]):
            blocks[(rec.year, s)].append(i)

    for key in sorted(blocks):
        members = blocks[key]
        for ai in range(len(members)):
            i = members[ai]
            for bi in range(ai + 1, len(members)):
                j = members[bi]
                if uf.find(i) == uf.find(j):
                    continue
                if records[i].doi and records[i].doi == records[j].doi:
                    continue  # pass 1 already owns exact-DOI pairs
                if len(surnames[i] & surnames[j]) < min_surname_overlap:
                    continue
                if token_set_ratio(titles[i], titles[j]) > ratio_threshold:
                    uf.union(i, j)

    groups: dict[int, list[int]] = defaultdict(list)
    for i in range(n):
        groups[uf.find(i)].append(i)

    papers: list[PaperRecord] = []
    record_to_paper = [""] * n
    used_ids: set[str] = set()
    for root in sorted(groups):
        member_idx = groups[root]
        paper = _merge_group([records[i] for i in member_idx], used_ids)
        used_ids.add(paper.paper_id)
        papers.append(paper)
        for i in member_idx:
            record_to_paper[i] = paper.paper_id

    papers.sort(key=lambda p: (p.year, p.paper_id))
    return papers, record_to_paper


def _merge_group(members: list[RawRecord], used_ids: set[str]) -> PaperRecord:
    def rep_order(rec: RawRecord) -> tuple:
        return (_SOURCE_PRIORITY[rec.source], -len(rec.authors), rec.title)

    rep = min(members, key=rep_order)

    dois = sorted({m.doi for m in members if m.doi})
    doi = dois[0] if dois else None
    if len(dois) > 1:
        log.debug("merged group carries %d DOIs, keeping %s", len(dois), doi)

    year_counts = Counter(m.year for m in members)
    year = min(sorted(year_counts), key=lambda y: (-year_counts[y], y))
    venue_counts = Counter(m.venue_slug for m in members)
    venue = min(sorted(venue_counts), key=lambda v: (-venue_counts[v], v))

    citations_by_source: dict[str, int] = {}
    for m in members:
        for src, count in m.citations.items():
            if count >= citations_by_source.get(src, 0):
                citations_by_source[src] = count

    authors: list[str] = []
    dropped = 0
    for ref in rep.authors:
        key = resolve_author(ref)
        if key is None:
            dropped += 1
        else:
            authors.append(key)
    if dropped:
        log.warning("dropped %d unresolvable author refs on %r", dropped, rep.title)

    pid = paper_surrogate_id(doi, rep.title_norm, year)
    suffix = 2
    while pid in used_ids:
        pid = paper_surrogate_id(doi, rep.title_norm, year) + f"-{suffix}"
        suffix += 1

    return PaperRecord(
        paper_id=pid,
        doi=doi,
        title=rep.title,
        title_norm=rep.title_norm,
        year=year,
        venue_slug=venue,
        authors=authors,
        citations=max(citations_by_source.values(), default=0),
        source_flags=sorted({m.source for m in members}),
        citations_by_source=citations_by_source,
    )
