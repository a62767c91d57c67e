"""Record types shared across the corpus stages."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .normalize import normalize_doi, normalize_title

SOURCES = ("primary-index", "doi-registry", "ieee-backfill")

MIN_YEAR = 1900
MAX_YEAR = 2100


@dataclass
class AuthorRef:
    """One author slot on a raw record, exactly as the source gave it."""

    display_name: str = ""
    upstream_id: str | None = None
    orcid: str | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "AuthorRef":
        return cls(
            display_name=(d.get("name") or d.get("display_name") or "").strip(),
            upstream_id=d.get("id") or None,
            orcid=_normalize_orcid(d.get("orcid")),
        )

    def to_dict(self) -> dict:
        out: dict = {"name": self.display_name}
        if self.upstream_id:
            out["id"] = self.upstream_id
        if self.orcid:
            out["orcid"] = self.orcid
        return out


def _normalize_orcid(orcid: str | None) -> str | None:
    if not orcid:
        return None
    o = orcid.strip().lower()
    for prefix in ("https://orcid.org/", "http://orcid.org/", "orcid.org/"):
        if o.startswith(prefix):
            o = o[len(prefix):]
            break
    o = o.strip("/").upper()
    return o or None


@dataclass
class RawRecord:
    """One record as fetched from one source, before dedup."""

    source: str
    title: str
    year: int
    venue_slug: str
    authors: list[AuthorRef] = field(default_factory=list)
    doi: str | None = None
    citations: dict[str, int] = field(default_factory=dict)
    abstract: str | None = None

    def __post_init__(self) -> None:
        if self.source not in SOURCES:
            raise ValueError(f"unknown source {self.source!r}")
        if not (MIN_YEAR <= int(self.year) <= MAX_YEAR):
            raise ValueError(f"year {self.year} outside [{MIN_YEAR}, {MAX_YEAR}]")
        self.year = int(self.year)
        self.doi = normalize_doi(self.doi)

    @property
    def title_norm(self) -> str:
        return normalize_title(self.title)

    @classmethod
    def from_dict(cls, d: dict) -> "RawRecord":
        return cls(
            source=d["source"],
            title=d.get("title") or "",
            year=d["year"],
            venue_slug=d["venue_slug"],
            authors=[AuthorRef.from_dict(a) for a in d.get("authors", [])],
            doi=d.get("doi"),
            citations={k: int(v) for k, v in (d.get("citations") or {}).items()},
            abstract=d.get("abstract"),
        )

    def to_dict(self) -> dict:
        out: dict = {
            "source": self.source,
            "doi": self.doi,
            "title": self.title,
            "year": self.year,
            "venue_slug": self.venue_slug,
            "authors": [a.to_dict() for a in self.authors],
            "citations": self.citations,
        }
        if self.abstract is not None:
            out["abstract"] = self.abstract
        return out


def paper_surrogate_id(doi: str | None, title_norm: str, year: int) -> str:
    """Stable surrogate key: digest of the DOI, else of (title_norm, year)."""
    basis = f"doi:{doi}" if doi else f"title:{title_norm}|{year}"
    return "p" + hashlib.sha256(basis.encode("utf-8")).hexdigest()[:16]


@dataclass
class PaperRecord:
    """One deduplicated paper."""

    paper_id: str
    title: str
    title_norm: str
    year: int
    venue_slug: str
    authors: list[str]
    citations: int = 0
    doi: str | None = None
    source_flags: list[str] = field(default_factory=list)
    citations_by_source: dict[str, int] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "PaperRecord":
        return cls(
            paper_id=d["paper_id"],
            title=d["title"],
            title_norm=d["title_norm"],
            year=int(d["year"]),
            venue_slug=d["venue_slug"],
            authors=list(d["authors"]),
            citations=int(d.get("citations", 0)),
            doi=d.get("doi"),
            source_flags=list(d.get("source_flags", [])),
            citations_by_source={
                k: int(v) for k, v in (d.get("citations_by_source") or {}).items()
            },
        )

    def to_dict(self) -> dict:
        return {
            "paper_id": self.paper_id,
            "doi": self.doi,
            "title": self.title,
            "title_norm": self.title_norm,
            "year": self.year,
            "venue_slug": self.venue_slug,
            "authors": self.authors,
            "citations": self.citations,
            "source_flags": self.source_flags,
            "citations_by_source": self.citations_by_source,
        }


@dataclass
class AuthorIdentity:
    """One resolved author: key, display name, memberships, provenance."""

    author_key: str
    display_name: str = ""
    orcid: str | None = None
    paper_ids: set[str] = field(default_factory=set)
    merged_from: set[str] = field(default_factory=set)

    @classmethod
    def from_dict(cls, d: dict) -> "AuthorIdentity":
        return cls(
            author_key=d["author_key"],
            display_name=d.get("display_name", ""),
            orcid=d.get("orcid"),
            paper_ids=set(d.get("paper_ids", [])),
            merged_from=set(d.get("merged_from", [])),
        )

    def to_dict(self) -> dict:
        return {
            "author_key": self.author_key,
            "display_name": self.display_name,
            "orcid": self.orcid,
            "paper_ids": sorted(self.paper_ids),
            "merged_from": sorted(self.merged_from),
        }
