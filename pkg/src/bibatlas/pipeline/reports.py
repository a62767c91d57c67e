"""Tab-separated tables and figure rendering for the describe stage."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from bibatlas.ioutil import atomic_write_text


def _write_tsv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = ["\t".join(header)]
    for row in rows:
        lines.append("\t".join("" if v is None else str(v) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_tables(out_dir: Path, report: dict, counts: dict[str, int]) -> list[str]:
    """Write the delimited views of the descriptive report; returns relpaths."""
    out_dir.mkdir(parents=True, exist_ok=True)
    rels = []

    growth = report["growth"]
    header = ["year"] + growth["venues"] + ["total"]
    rows = [
        [year]
        + [growth["counts"][v][i] for v in growth["venues"]]
        + [growth["totals"][i]]
        for i, year in enumerate(growth["years"])
    ]
    _write_tsv(out_dir / "growth.tsv", header, rows)
    rels.append("descriptive/growth.tsv")

    team = report["team_size"]
    header = ["year"]
    for venue in team["venues"]:
        header += [f"{venue}_mean", f"{venue}_rolling"]
    header.append("single_author_fraction")
    rows = []
    for i, year in enumerate(team["years"]):
        row = [year]
        for venue in team["venues"]:
            row += [team["mean_team"][venue][i], team["rolling_mean"][venue][i]]
        row.append(team["single_author_fraction"][i])
        rows.append(row)
    _write_tsv(out_dir / "team_size.tsv", header, rows)
    rels.append("descriptive/team_size.tsv")

    venue_rows = [
        [slug] + [vs[c] for c in (
            "papers",
            "unique_authors",
            "single_author_pct",
            "mean_authors",
            "max_authors",
            "collaborations",
            "papers_per_author",
            "mean_citations",
        )]
        for slug, vs in sorted(report["venues"].items())
    ]
    _write_tsv(
        out_dir / "venues.tsv",
        [
            "venue",
            "papers",
            "unique_authors",
            "single_author_pct",
            "mean_authors",
            "max_authors",
            "collaborations",
            "papers_per_author",
            "mean_citations",
        ],
        venue_rows,
    )
    rels.append("descriptive/venues.tsv")

    freq: dict[int, int] = {}
    for c in counts.values():
        freq[c] = freq.get(c, 0) + 1
    _write_tsv(
        out_dir / "lotka.tsv",
        ["paper_count", "authors"],
        [[k, freq[k]] for k in sorted(freq)],
    )
    rels.append("descriptive/lotka.tsv")

    _write_tsv(
        out_dir / "contributors.tsv",
        ["author_key", "papers"],
        [[r["author_key"], r["papers"]] for r in report["top_contributors"]],
    )
    rels.append("descriptive/contributors.tsv")

    _write_tsv(
        out_dir / "most_cited.tsv",
        ["paper_id", "title", "year", "venue", "citations"],
        [
            [r["paper_id"], r["title"], r["year"], r["venue"], r["citations"]]
            for r in report["most_cited"]
        ],
    )
    rels.append("descriptive/most_cited.tsv")
    return rels


def render_figures(fig_dir: Path, report: dict, counts: dict[str, int]) -> list[str]:
    """Render the report's series as PNG files; returns relpaths."""
    fig_dir.mkdir(parents=True, exist_ok=True)
    rels = []

    growth = report["growth"]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    bottoms = [0.0] * len(growth["years"])
    for venue in growth["venues"]:
        series = growth["counts"][venue]
        ax.bar(growth["years"], series, bottom=bottoms, label=venue)
        bottoms = [b + s for b, s in zip(bottoms, series)]
    ax.set_xlabel("year")
    ax.set_ylabel("papers")
    ax.set_title("Corpus growth by venue")
    if growth["venues"]:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(fig_dir / "growth.png", dpi=120)
    plt.close(fig)
    rels.append("descriptive/figures/growth.png")

    team = report["team_size"]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for venue in team["venues"]:
        ax.plot(team["years"], team["rolling_mean"][venue], "-", label=venue)
    ax2 = ax.twinx()
    ax2.plot(
        team["years"],
        team["single_author_fraction"],
        "--",
        color="gray",
        label="single-author share",
    )
    ax2.set_ylabel("single-author share")
    ax.set_xlabel("year")
    ax.set_ylabel("authors per paper")
    ax.set_title("Team size over time")
    ax.legend(fontsize=8, loc="upper left")
    fig.tight_layout()
    fig.savefig(fig_dir / "team_size.png", dpi=120)
    plt.close(fig)
    rels.append("descriptive/figures/team_size.png")

    freq: dict[int, int] = {}
    for c in counts.values():
        freq[c] = freq.get(c, 0) + 1
    fig, ax = plt.subplots(figsize=(6, 4.5))
    xs = sorted(freq)
    ax.loglog(xs, [freq[x] for x in xs], "o", ms=4)
    lotka = report["lotka"]
    if "alpha" in lotka:
        import math

        ax.loglog(
            xs,
            [math.exp(lotka["intercept"]) * x ** (-lotka["alpha"]) for x in xs],
            "-",
            label=f"alpha = {lotka['alpha']:.2f}",
        )
        ax.legend(fontsize=8)
    ax.set_xlabel("papers per author")
    ax.set_ylabel("authors")
    ax.set_title("Productivity distribution")
    fig.tight_layout()
    fig.savefig(fig_dir / "productivity.png", dpi=120)
    plt.close(fig)
    rels.append("descriptive/figures/productivity.png")
    return rels
