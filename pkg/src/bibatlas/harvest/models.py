"""Harvest-side value types: venue specs and resumable checkpoints."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from bibatlas.ioutil import read_json, write_json


class NoMatchError(LookupError):
    """No upstream source matches any of the venue's ISSNs."""


class AmbiguousMatchError(LookupError):
    """Multiple upstream sources match; resolution must not guess."""

    def __init__(self, slug: str, candidates: list[str]) -> None:
        super().__init__(
            f"venue {slug!r} matches {len(candidates)} upstream sources: "
            + ", ".join(candidates)
        )
        self.candidates = candidates


@dataclass
class VenueSpec:
    slug: str
    issns: list[str]
    source_id: str | None = None

    def __post_init__(self) -> None:
        if not self.issns:
            raise ValueError(f"venue {self.slug!r} needs at least one ISSN")

    @classmethod
    def from_dict(cls, doc: dict) -> "VenueSpec":
        return cls(
            slug=doc["slug"],
            issns=list(doc["issns"]),
            source_id=doc.get("source_id"),
        )

    def to_dict(self) -> dict:
        out = {"slug": self.slug, "issns": list(self.issns)}
        if self.source_id is not None:
            out["source_id"] = self.source_id
        return out


@dataclass
class Checkpoint:
    """Per-venue resume state. The cursor is opaque: stored, never parsed.

    records_fetched counts durably written records, so a resumed run can
    truncate its output file to that many lines before continuing.
    """

    venue_slug: str
    cursor: str | None = None
    records_fetched: int = 0
    completed: bool = False
    pages_fetched: int = 0
    skipped_pages: int = 0
    meta: dict = field(default_factory=dict)

    def save(self, path: str | Path) -> None:
        write_json(
            path,
            {
                "schema": "checkpoint-v1",
                "venue_slug": self.venue_slug,
                "cursor": self.cursor,
                "records_fetched": self.records_fetched,
                "completed": self.completed,
                "pages_fetched": self.pages_fetched,
                "skipped_pages": self.skipped_pages,
                "meta": self.meta,
            },
        )

    @classmethod
    def load(cls, path: str | Path) -> "Checkpoint":
        doc = read_json(path)
        if doc.get("schema") != "checkpoint-v1":
            raise ValueError(f"{path}: unexpected checkpoint schema")
        return cls(
            venue_slug=doc["venue_slug"],
            cursor=doc.get("cursor"),
            records_fetched=int(doc.get("records_fetched", 0)),
            completed=bool(doc.get("completed", False)),
            pages_fetched=int(doc.get("pages_fetched", 0)),
            skipped_pages=int(doc.get("skipped_pages", 0)),
            meta=doc.get("meta", {}),
        )
