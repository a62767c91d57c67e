"""Corpus construction: record normalization, dedup, author identities."""

from .normalize import (
    fold_text,
    normalize_doi,
    normalize_title,
    surname_and_initial,
    surname_of,
    token_set_ratio,
)
from .models import AuthorIdentity, AuthorRef, PaperRecord, RawRecord
from .dedup import dedup
from .identity import (
    apply_aliases,
    build_identities,
    load_alias_table,
    merge_by_orcid,
    reconcile_citations,
    resolve_author,
)
from .audit import audit_split_candidates

__all__ = [
    "AuthorIdentity",
    "AuthorRef",
    "PaperRecord",
    "RawRecord",
    "apply_aliases",
    "audit_split_candidates",
    "build_identities",
    "dedup",
    "fold_text",
    "load_alias_table",
    "merge_by_orcid",
    "normalize_doi",
    "normalize_title",
    "reconcile_citations",
    "resolve_author",
    "surname_and_initial",
    "surname_of",
    "token_set_ratio",
]
