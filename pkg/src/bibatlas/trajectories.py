"""Career trajectories in a 2-D projection: bins, path stats, taxonomy.

Each author's papers are grouped into five-year bins anchored at their
first year in the corpus; every non-empty bin gets a citation-weighted
centroid in the provided projection. Trajectories with enough bins are
classified as stayer / drifter / returner / switcher from their total
path, efficiency, and net displacement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

BIN_YEARS = 5
CLASSES = ("stayer", "drifter", "returner", "switcher")


@dataclass
class TrajectoryBin:
    author_key: str
    index: int
    year_start: int
    centroid: tuple[float, float]
    paper_count: int
    citation_weight: float

    @property
    def year_range(self) -> tuple[int, int]:
        return (self.year_start, self.year_start + BIN_YEARS - 1)


@dataclass
class Trajectory:
    author_key: str
    bins: list[TrajectoryBin]
    total_path: float = 0.0
    net: float = 0.0
    efficiency: float = 1.0
    klass: str = ""
    papers: int = 0
    citations: int = 0
    span_years: int = 0

    @property
    def bin_count(self) -> int:
        return len(self.bins)

    def to_dict(self) -> dict:
        return {
            "author_key": self.author_key,
            "bins": [
                {
                    "index": b.index,
                    "year_start": b.year_start,
                    "centroid": [b.centroid[0], b.centroid[1]],
                    "paper_count": b.paper_count,
                    "citation_weight": b.citation_weight,
                }
                for b in self.bins
            ],
            "total_path": self.total_path,
            "net": self.net,
            "efficiency": self.efficiency,
            "class": self.klass,
            "papers": self.papers,
            "citations": self.citations,
            "span_years": self.span_years,
            "bin_count": self.bin_count,
        }


def build_trajectories(
    papers,
    coords: dict[str, tuple[float, float]],
    min_bins: int = 2,
    drop_partial_bin: bool = True,
    current_year: int | None = None,
    tau_stay: float = 15.0,
    tau_eta: float = 0.60,
    tau_net: float = 15.0,
) -> list[Trajectory]:
    """Build, measure, and classify one trajectory per qualifying author.

    Bin centroids weight each paper by 1 + ln(1 + citations). When
    drop_partial_bin is set, an author's final bin is discarded if its
    five-year window extends past the last full calendar year covered by
    the corpus. Authors with fewer than min_bins non-empty bins (after the
    drop) are excluded.
    """
    by_author: dict[str, list] = {}
    for paper in papers:
        if paper.paper_id not in coords:
            continue
        for key in set(paper.authors):
            by_author.setdefault(key, []).append(paper)

    if current_year is None:
        years = [p.year for p in papers]
        current_year = max(years) if years else 0

    out: list[Trajectory] = []
    for key in sorted(by_author):
        mine = by_author[key]
        first_year = min(p.year for p in mine)
        bins_raw: dict[int, list] = {}
        for paper in mine:
            bins_raw.setdefault((paper.year - first_year) // BIN_YEARS, []).append(paper)

        bins: list[TrajectoryBin] = []
        kept_papers: list = []
        for index in sorted(bins_raw):
            year_start = first_year + index * BIN_YEARS
            if drop_partial_bin and year_start + BIN_YEARS - 1 > current_year:
                continue
            members = bins_raw[index]
            wx = wy = wsum = 0.0
            for paper in members:
                w = 1.0 + math.log1p(max(0, paper.citations))
                x, y = coords[paper.paper_id]
                wx += w * x
                wy += w * y
                wsum += w
            bins.append(
                TrajectoryBin(
                    author_key=key,
                    index=index,
                    year_start=year_start,
                    centroid=(wx / wsum, wy / wsum),
                    paper_count=len(members),
                    citation_weight=wsum,
                )
            )
            kept_papers.extend(members)

        if len(bins) < min_bins:
            continue
        traj = Trajectory(author_key=key, bins=bins)
        if len(bins) >= 2:
            traj.total_path, traj.net, traj.efficiency = path_stats(traj)
        else:
            # min_bins=1 admits single-bin authors: stationary by definition
            traj.total_path, traj.net, traj.efficiency = 0.0, 0.0, 1.0
        traj.klass = classify(
            (traj.total_path, traj.net, traj.efficiency), tau_stay, tau_eta, tau_net
        )
        traj.papers = len(kept_papers)
        traj.citations = sum(p.citations for p in kept_papers)
        years = [p.year for p in kept_papers]
        traj.span_years = max(years) - min(years) + 1
        out.append(traj)
    return out


def path_stats(trajectory: Trajectory) -> tuple[float, float, float]:
    """(total_path, net, efficiency) over the bin centroids.

    total_path sums consecutive centroid distances; net is the end-to-end
    distance; efficiency is net / total_path, defined as 1 when the path
    length is zero (the degenerate stationary case).
    """
    pts = [b.centroid for b in trajectory.bins]
    if len(pts) < 2:
        raise ValueError("path stats need at least 2 bins")
    total = 0.0
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        total += math.hypot(x1 - x0, y1 - y0)
    net = math.hypot(pts[-1][0] - pts[0][0], pts[-1][1] - pts[0][1])
    eta = net / total if total > 0 else 1.0
    return total, net, eta


def classify(
    stats: tuple[float, float, float],
    tau_stay: float = 15.0,
    tau_eta: float = 0.60,
    tau_net: float = 15.0,
) -> str:
    """Stayer iff path < tau_stay; else drifter iff eta >= tau_eta; else
    returner iff net < tau_net; else switcher."""
    path, net, eta = stats
    if path < tau_stay:
        return "stayer"
    if eta >= tau_eta:
        return "drifter"
    if net < tau_net:
        return "returner"
    return "switcher"


def _lower_median(values: list[float]):
    """Order statistic ceil(n/2) (1-based): the lower middle for even n."""
    if not values:
        return None
    ordered = sorted(values)
    return ordered[(len(ordered) + 1) // 2 - 1]


def class_summary(trajectories: list[Trajectory], min_bins: int = 3) -> dict[str, dict]:
    """Per-class medians over trajectories with at least min_bins bins.

    Columns: n, total_path, net, efficiency, papers, citations, span_years,
    bins. Empty classes report n=0 with absent medians.
    """
    subset = [t for t in trajectories if t.bin_count >= min_bins]
    out: dict[str, dict] = {}
    for klass in CLASSES:
        rows = [t for t in subset if t.klass == klass]
        entry: dict = {"n": len(rows)}
        if rows:
            entry.update(
                total_path=_lower_median([t.total_path for t in rows]),
                net=_lower_median([t.net for t in rows]),
                efficiency=_lower_median([t.efficiency for t in rows]),
                papers=_lower_median([t.papers for t in rows]),
                citations=_lower_median([t.citations for t in rows]),
                span_years=_lower_median([t.span_years for t in rows]),
                bins=_lower_median([t.bin_count for t in rows]),
            )
        else:
            entry.update(
                total_path=None, net=None, efficiency=None,
                papers=None, citations=None, span_years=None, bins=None,
            )
        out[klass] = entry
    return out
