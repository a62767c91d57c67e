"""Venue resolution, paginated work fetching, and abstract backfill.

Targets the OpenAlex works/sources API shape for the primary stream and
the IEEE Xplore metadata API for abstract backfill. Both run through the
Transport protocol, so tests drive them with recorded pages.
"""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Callable

from bibatlas.corpus.models import AuthorRef, RawRecord
from bibatlas.harvest.models import AmbiguousMatchError, Checkpoint, NoMatchError, VenueSpec
from bibatlas.harvest.transport import RateLimiter, Transport, fetch_json
from bibatlas.ioutil import canonical_json

log = logging.getLogger(__name__)

OPENALEX_BASE = "https://api.openalex.org"
IEEE_BASE = "https://ieeexploreapi.ieee.org/api/v1/search/articles"
IEEE_KEY_ENV = "IEEE_API_KEY"
PER_PAGE = 200
IEEE_CEILING = 10_000


def decode_inverted_index(index: dict[str, list[int]] | None) -> str | None:
    """Rebuild abstract text from a token -> positions inverted index."""
    if not index:
        return None
    slots: dict[int, str] = {}
    for token, positions in index.items():
        for pos in positions:
            slots[int(pos)] = token
    return " ".join(slots[pos] for pos in sorted(slots))


def resolve_venue(
    spec: VenueSpec,
    transport: Transport,
    limiter: RateLimiter,
    base_url: str = OPENALEX_BASE,
    mailto: str | None = None,
) -> VenueSpec:
    """Fill in the upstream source id by ISSN lookup.

    All of the venue's ISSNs must agree on a single source; zero matches
    and multi-source matches are both surfaced as errors, never guessed
    through.
    """
    candidates: list[str] = []
    for issn in spec.issns:
        params = {"filter": f"issn:{issn}"}
        if mailto:
            params["mailto"] = mailto
        body = fetch_json(transport, limiter, f"{base_url}/sources", params=params)
        for source in (body or {}).get("results", []):
            sid = source.get("id")
            if sid and sid not in candidates:
                candidates.append(sid)
    if not candidates:
        raise NoMatchError(f"venue {spec.slug!r}: no source matches ISSNs {spec.issns}")
    if len(candidates) > 1:
        raise AmbiguousMatchError(spec.slug, candidates)
    return VenueSpec(slug=spec.slug, issns=list(spec.issns), source_id=candidates[0])


def parse_work(work: dict, venue_slug: str, source: str = "primary-index") -> RawRecord:
    """One upstream work JSON object -> RawRecord. Raises on missing title
    or year; the caller skips and logs such rows."""
    title = work.get("display_name") or work.get("title")
    year = work.get("publication_year")
    if not title or year is None:
        raise ValueError("work lacks title or year")
    refs = []
    for authorship in work.get("authorships", []):
        author = authorship.get("author") or {}
        if not author.get("display_name"):
            continue
        refs.append(
            AuthorRef.from_dict(
                {
                    "name": author["display_name"],
                    "id": author.get("id"),
                    "orcid": author.get("orcid"),
                }
            )
        )
    citations = {}
    if work.get("cited_by_count") is not None:
        citations[source] = int(work["cited_by_count"])
    return RawRecord(
        source=source,
        doi=work.get("doi"),
        title=str(title),
        year=int(year),
        venue_slug=venue_slug,
        authors=refs,
        citations=citations,
        abstract=decode_inverted_index(work.get("abstract_inverted_index"))
        or work.get("abstract"),
    )


def _truncate_jsonl(path: Path, keep_lines: int) -> None:
    """Keep exactly the first keep_lines lines; resume-safety for output
    that may have outrun the last durable checkpoint."""
    if not path.exists():
        if keep_lines:
            raise ValueError(f"{path} missing but checkpoint has records")
        return
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    if len(lines) < keep_lines:
        raise ValueError(
            f"{path} has {len(lines)} lines, checkpoint expects >= {keep_lines}"
        )
    if len(lines) > keep_lines:
        with open(path, "w", encoding="utf-8") as fh:
            fh.writelines(lines[:keep_lines])


def fetch_venue(
    spec: VenueSpec,
    checkpoint: Checkpoint,
    transport: Transport,
    limiter: RateLimiter,
    out_path: str | Path,
    checkpoint_path: str | Path,
    base_url: str = OPENALEX_BASE,
    per_page: int = PER_PAGE,
    mailto: str | None = None,
    page_hook: Callable[[int], None] | None = None,
) -> Checkpoint:
    """Cursor-paginate one venue's works into a JSON Lines file.

    The checkpoint advances only after a page's records are durably on
    disk, and a resumed run first truncates the output back to the
    checkpointed count, so interrupt-anywhere resume never duplicates or
    loses records. page_hook fires after each durable page (tests use it
    to simulate crashes).
    """
    if spec.source_id is None:
        raise ValueError(f"venue {spec.slug!r} is unresolved")
    if checkpoint.venue_slug != spec.slug:
        raise ValueError("checkpoint belongs to a different venue")
    if checkpoint.completed:
        return checkpoint

    out_path = Path(out_path)
    checkpoint_path = Path(checkpoint_path)
    _truncate_jsonl(out_path, checkpoint.records_fetched)
    cursor = checkpoint.cursor or "*"

    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "a", encoding="utf-8") as out:
        while True:
            params = {
                "filter": f"primary_location.source.id:{spec.source_id}",
                "per-page": per_page,
                "cursor": cursor,
            }
            if mailto:
                params["mailto"] = mailto
            body = fetch_json(transport, limiter, f"{base_url}/works", params=params)
            next_cursor = ((body or {}).get("meta") or {}).get("next_cursor")
            results = (body or {}).get("results")
            if results is None:
                checkpoint.skipped_pages += 1
                log.warning("venue %s: malformed page at cursor %r", spec.slug, cursor)
                if not next_cursor:
                    break
                cursor = next_cursor
                continue
            written = 0
            for work in results:
                try:
                    record = parse_work(work, spec.slug)
                except (ValueError, TypeError, KeyError) as exc:
                    log.warning("venue %s: skipping work: %s", spec.slug, exc)
                    continue
                out.write(canonical_json(record.to_dict()) + "\n")
                written += 1
            out.flush()
            os.fsync(out.fileno())
            checkpoint.records_fetched += written
            checkpoint.pages_fetched += 1
            checkpoint.cursor = next_cursor
            if not next_cursor or not results:
                checkpoint.completed = True
            checkpoint.save(checkpoint_path)
            if page_hook is not None:
                page_hook(checkpoint.pages_fetched)
            if checkpoint.completed:
                break
            cursor = next_cursor
    return checkpoint


def backfill_abstracts(
    records: list[RawRecord],
    transport: Transport,
    limiter: RateLimiter,
    api_key: str | None = None,
    base_url: str = IEEE_BASE,
    ceiling: int = IEEE_CEILING,
) -> dict:
    """Fill missing abstracts from the IEEE metadata API, by DOI.

    Existing abstracts are never overwritten. At most `ceiling` records
    are queried per venue; hitting it marks the venue partially
    backfilled. Returns per-venue counts (queried, filled, misses,
    partial).
    """
    api_key = api_key or os.environ.get(IEEE_KEY_ENV)
    if not api_key:
        raise ValueError(f"IEEE backfill needs an API key ({IEEE_KEY_ENV})")
    stats: dict[str, dict] = {}
    queried_per_venue: dict[str, int] = {}
    for record in records:
        venue = record.venue_slug
        entry = stats.setdefault(
            venue, {"queried": 0, "filled": 0, "misses": 0, "partial": False}
        )
        if record.abstract or not record.doi:
            continue
        if queried_per_venue.get(venue, 0) >= ceiling:
            entry["partial"] = True
            continue
        queried_per_venue[venue] = queried_per_venue.get(venue, 0) + 1
        entry["queried"] += 1
        body = fetch_json(
            transport,
            limiter,
            base_url,
            params={"doi": record.doi, "apikey": api_key},
        )
        articles = (body or {}).get("articles") or []
        abstract = articles[0].get("abstract") if articles else None
        if abstract:
            record.abstract = str(abstract)
            entry["filled"] += 1
        else:
            entry["misses"] += 1
    return stats
