"""Shared builders for corpus fixtures."""

from __future__ import annotations

import pytest

from bibatlas.corpus.models import AuthorRef, PaperRecord, RawRecord


def record(
    title: str,
    year: int = 2015,
    authors: list[str] | None = None,
    source: str = "primary-index",
    venue: str = "venue-a",
    doi: str | None = None,
    citations: int = 0,
    orcids: dict[str, str] | None = None,
    upstream: dict[str, str] | None = None,
) -> RawRecord:
    refs = []
    for name in authors or ["Ada Ada"]:
        refs.append(
            AuthorRef(
                display_name=name,
                upstream_id=(upstream or {}).get(name),
                orcid=(orcids or {}).get(name),
            )
        )
    return RawRecord(
        source=source,
        title=title,
        year=year,
        venue_slug=venue,
        authors=refs,
        doi=doi,
        citations={source: citations},
    )


def paper(
    pid: str,
    authors: list[str],
    year: int = 2015,
    venue: str = "venue-a",
    citations: int = 0,
    title: str | None = None,
) -> PaperRecord:
    title = title or f"Paper {pid}"
    return PaperRecord(
        paper_id=pid,
        title=title,
        title_norm=title.lower(),
        year=year,
        venue_slug=venue,
        authors=authors,
        citations=citations,
    )


@pytest.fixture
def mkrecord():
    return record


@pytest.fixture
def mkpaper():
    return paper
