"""Scholarly-metadata API clients with resumable per-venue checkpoints."""

from bibatlas.harvest.models import AmbiguousMatchError, Checkpoint, NoMatchError, VenueSpec
from bibatlas.harvest.transport import RateLimiter, RequestsTransport, fetch_json
from bibatlas.harvest.client import (
    backfill_abstracts,
    decode_inverted_index,
    fetch_venue,
    parse_work,
    resolve_venue,
)

__all__ = [
    "AmbiguousMatchError",
    "Checkpoint",
    "NoMatchError",
    "VenueSpec",
    "RateLimiter",
    "RequestsTransport",
    "fetch_json",
    "backfill_abstracts",
    "decode_inverted_index",
    "fetch_venue",
    "parse_work",
    "resolve_venue",
]
