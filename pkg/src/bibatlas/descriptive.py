"""Corpus-level descriptive bibliometrics.

Growth and team-size series per venue, per-venue summary columns, ranked
contributor / citation lists, and the log-log least-squares fit of the
author productivity distribution.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, asdict


@dataclass
class VenueStats:
    venue: str
    papers: int
    unique_authors: int
    single_author_pct: float
    mean_authors: float
    max_authors: int
    collaborations: int
    papers_per_author: float
    mean_citations: float

    def to_dict(self) -> dict:
        return asdict(self)


def _team_size(paper) -> int:
    # distinct resolved people on the byline; duplicate positions after an
    # identity merge do not inflate team size
    return len(set(paper.authors))


def _dense_years(papers) -> list[int]:
    years = [p.year for p in papers]
    if not years:
        return []
    return list(range(min(years), max(years) + 1))


def growth_series(papers) -> dict:
    """Dense year x venue publication-count matrix, zero-filled."""
    years = _dense_years(papers)
    venues = sorted({p.venue_slug for p in papers})
    index = {y: i for i, y in enumerate(years)}
    counts = {v: [0] * len(years) for v in venues}
    for paper in papers:
        counts[paper.venue_slug][index[paper.year]] += 1
    totals = [sum(counts[v][i] for v in venues) for i in range(len(years))]
    return {"years": years, "venues": venues, "counts": counts, "totals": totals}


def _rolling_pooled_mean(
    author_sums: list[int], paper_counts: list[int], window: int
) -> list[float | None]:
    """Centered rolling mean of authors per paper, pooled over the window.

    Windows shrink at the series edges; a window with no papers yields None.
    """
    half = window // 2
    n = len(paper_counts)
    out: list[float | None] = []
    for i in range(n):
        lo = max(0, i - half)
        hi = min(n, i + half + 1)
        total_papers = sum(paper_counts[lo:hi])
        if total_papers == 0:
            out.append(None)
        else:
            out.append(sum(author_sums[lo:hi]) / total_papers)
    return out


def team_size_series(papers, window: int = 3) -> dict:
    """Per-venue centered rolling mean team size and the yearly
    single-author fraction across the corpus."""
    years = _dense_years(papers)
    venues = sorted({p.venue_slug for p in papers})
    index = {y: i for i, y in enumerate(years)}
    n = len(years)

    author_sums = {v: [0] * n for v in venues}
    paper_counts = {v: [0] * n for v in venues}
    single = [0] * n
    total = [0] * n
    for paper in papers:
        i = index[paper.year]
        size = _team_size(paper)
        author_sums[paper.venue_slug][i] += size
        paper_counts[paper.venue_slug][i] += 1
        total[i] += 1
        if size == 1:
            single[i] += 1

    mean_team = {
        v: [
            author_sums[v][i] / paper_counts[v][i] if paper_counts[v][i] else None
            for i in range(n)
        ]
        for v in venues
    }
    rolling = {
        v: _rolling_pooled_mean(author_sums[v], paper_counts[v], window)
        for v in venues
    }
    single_fraction = [
        single[i] / total[i] if total[i] else None for i in range(n)
    ]
    return {
        "years": years,
        "venues": venues,
        "mean_team": mean_team,
        "rolling_mean": rolling,
        "single_author_fraction": single_fraction,
        "window": window,
    }


def author_paper_counts(papers) -> Counter:
    counts: Counter = Counter()
    for paper in papers:
        for key in set(paper.authors):
            counts[key] += 1
    return counts


def lotka_fit(paper_counts) -> tuple[float, float, float]:
    """Least squares on (ln papers, ln author frequency); alpha = -slope.

    Accepts either a mapping author -> paper count or an iterable of
    counts. Returns (alpha, intercept, r_squared). Raises ValueError when
    fewer than 2 distinct count values occur.
    """
    if hasattr(paper_counts, "values"):
        values = list(paper_counts.values())
    else:
        values = list(paper_counts)
    freq = Counter(v for v in values if v >= 1)
    if len(freq) < 2:
        raise ValueError("productivity fit needs at least 2 distinct paper counts")

    xs = []
    ys = []
    for count in sorted(freq):
        xs.append(math.log(count))
        ys.append(math.log(freq[count]))
    n = len(xs)
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    sxx = sum((x - mean_x) ** 2 for x in xs)
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = mean_y - slope * mean_x
    ss_res = sum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys))
    ss_tot = sum((y - mean_y) ** 2 for y in ys)
    if ss_tot > 0:
        r2 = 1.0 - ss_res / ss_tot
    else:
        r2 = 1.0 if ss_res == 0 else 0.0
    return -slope, intercept, r2


def venue_stats(papers) -> dict[str, VenueStats]:
    """Per-venue summary columns over the deduplicated corpus."""
    by_venue: dict[str, list] = {}
    for paper in papers:
        by_venue.setdefault(paper.venue_slug, []).append(paper)

    out: dict[str, VenueStats] = {}
    for venue in sorted(by_venue):
        mine = by_venue[venue]
        sizes = [_team_size(p) for p in mine]
        authors: set[str] = set()
        for paper in mine:
            authors.update(paper.authors)
        n_papers = len(mine)
        n_single = sum(1 for s in sizes if s == 1)
        out[venue] = VenueStats(
            venue=venue,
            papers=n_papers,
            unique_authors=len(authors),
            single_author_pct=100.0 * n_single / n_papers,
            mean_authors=sum(sizes) / n_papers,
            max_authors=max(sizes),
            collaborations=sum(s * (s - 1) // 2 for s in sizes),
            papers_per_author=n_papers / len(authors) if authors else 0.0,
            mean_citations=sum(p.citations for p in mine) / n_papers,
        )
    return out


def top_contributors(papers, top_n: int = 10) -> list[dict]:
    counts = author_paper_counts(papers)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:top_n]
    return [{"author_key": k, "papers": c} for k, c in ranked]


def most_cited(papers, top_n: int = 10) -> list[dict]:
    ranked = sorted(papers, key=lambda p: (-p.citations, p.paper_id))[:top_n]
    return [
        {
            "paper_id": p.paper_id,
            "title": p.title,
            "year": p.year,
            "venue": p.venue_slug,
            "citations": p.citations,
        }
        for p in ranked
    ]


def career_spans(papers) -> dict[str, int]:
    """Career span per author: last year - first year + 1 in this corpus."""
    first: dict[str, int] = {}
    last: dict[str, int] = {}
    for paper in papers:
        for key in set(paper.authors):
            if key not in first or paper.year < first[key]:
                first[key] = paper.year
            if key not in last or paper.year > last[key]:
                last[key] = paper.year
    return {k: last[k] - first[k] + 1 for k in first}
