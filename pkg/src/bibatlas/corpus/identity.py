"""Author identity resolution, ORCID consolidation, and alias curation."""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from pathlib import Path

from ..ioutil import read_json
from .models import AuthorIdentity, AuthorRef, RawRecord
from .normalize import surname_and_initial

log = logging.getLogger(__name__)


def resolve_author(ref: AuthorRef) -> str | None:
    """Map an author ref to its identity key.

    Fallback chain: upstream id, then ORCID, then folded surname plus first
    initial. Refs with none of these resolve to None and are dropped by the
    caller.
    """
    if ref.upstream_id:
        return f"upstream:{ref.upstream_id}"
    if ref.orcid:
        return f"orcid:{ref.orcid}"
    surname, initial = surname_and_initial(ref.display_name)
    if surname:
        return f"name:{surname}_{initial}"
    return None


def build_identities(
    records: list[RawRecord], record_to_paper: list[str]
) -> dict[str, AuthorIdentity]:
    """Aggregate refs into one identity per key.

    Display name is the most frequent form (ties break lexicographically).
    An identity whose refs carry conflicting ORCIDs keeps none and is
    flagged in the log; merge_by_orcid will then leave it alone.
    """
    names: dict[str, Counter] = defaultdict(Counter)
    orcids: dict[str, set[str]] = defaultdict(set)
    papers: dict[str, set[str]] = defaultdict(set)

    for rec, paper_id in zip(records, record_to_paper):
        for ref in rec.authors:
            key = resolve_author(ref)
            if key is None:
                continue
            if ref.display_name:
                names[key][ref.display_name] += 1
            if ref.orcid:
                orcids[key].add(ref.orcid)
            papers[key].add(paper_id)

    identities: dict[str, AuthorIdentity] = {}
    for key in sorted(papers):
        name_counter = names.get(key, Counter())
        if name_counter:
            display = min(sorted(name_counter), key=lambda n: (-name_counter[n], n))
        else:
            display = ""
        seen_orcids = sorted(orcids.get(key, ()))
        orcid = seen_orcids[0] if len(seen_orcids) == 1 else None
        if len(seen_orcids) > 1:
            log.warning("identity %s carries conflicting ORCIDs %s", key, seen_orcids)
        identities[key] = AuthorIdentity(
            author_key=key,
            display_name=display,
            orcid=orcid,
            paper_ids=set(papers[key]),
        )
    return identities


def merge_by_orcid(
    identities: dict[str, AuthorIdentity],
) -> tuple[dict[str, AuthorIdentity], dict[str, str]]:
    """Merge identities sharing an ORCID into the key with the most papers.

    Ties break to the lexicographically smallest key. Returns the merged
    store and the alias map describing what moved where.
    """
    by_orcid: dict[str, list[str]] = defaultdict(list)
    for key in sorted(identities):
        ident = identities[key]
        if ident.orcid:
            by_orcid[ident.orcid].append(key)

    merged = dict(identities)
    alias_map: dict[str, str] = {}
    for orcid in sorted(by_orcid):
        keys = by_orcid[orcid]
        if len(keys) < 2:
            continue
        winner_key = min(keys, key=lambda k: (-len(identities[k].paper_ids), k))
        winner = merged[winner_key]
        for key in keys:
            if key == winner_key:
                continue
            loser = merged.pop(key)
            winner.paper_ids |= loser.paper_ids
            winner.merged_from |= loser.merged_from | {key}
            alias_map[key] = winner_key
    return merged, alias_map


def load_alias_table(path: str | Path) -> dict[str, str]:
    """Read the human-curated alias table.

    Format: {"schema": "alias-v1", "aliases": [{"from": ..., "to": ...,
    "note": ...}]}. Notes are provenance for curators and are ignored here.
    """
    doc = read_json(path)
    if doc.get("schema") != "alias-v1":
        raise ValueError(f"unexpected alias table schema {doc.get('schema')!r}")
    table: dict[str, str] = {}
    for entry in doc.get("aliases", []):
        src, dst = entry["from"], entry["to"]
        if src in table and table[src] != dst:
            raise ValueError(f"alias table maps {src!r} to two targets")
        table[src] = dst
    _validate_acyclic(table)
    return table


def _validate_acyclic(table: dict[str, str]) -> None:
    for start in table:
        seen = {start}
        cur = start
        while cur in table:
            cur = table[cur]
            if cur in seen:
                raise ValueError(f"alias cycle through {start!r}")
            seen.add(cur)


def resolve_alias_chain(table: dict[str, str], key: str) -> str:
    cur = key
    while cur in table:
        cur = table[cur]
    return cur


def apply_aliases(
    identities: dict[str, AuthorIdentity], table: dict[str, str]
) -> tuple[dict[str, AuthorIdentity], dict[str, str]]:
    """Fold aliased identities into their canonical targets.

    Chains resolve transitively (the table is validated acyclic), so the
    operation is idempotent. Returns the new store plus the flat key map.
    """
    _validate_acyclic(table)
    flat: dict[str, str] = {}
    for key in sorted(identities):
        target = resolve_alias_chain(table, key)
        if target != key:
            flat[key] = target

    merged = {k: v for k, v in identities.items() if k not in flat}
    for key in sorted(flat):
        target = flat[key]
        loser = identities[key]
        if target not in merged:
            merged[target] = AuthorIdentity(
                author_key=target,
                display_name=loser.display_name,
                orcid=loser.orcid,
            )
        winner = merged[target]
        winner.paper_ids |= loser.paper_ids
        winner.merged_from |= loser.merged_from | {key}
        if not winner.display_name:
            winner.display_name = loser.display_name
        if winner.orcid is None:
            winner.orcid = loser.orcid
    return merged, flat


def remap_paper_authors(authors: list[str], mapping: dict[str, str]) -> list[str]:
    """Rewrite a paper's author keys position-wise, preserving incidences."""
    return [mapping.get(k, k) for k in authors]


def reconcile_citations(citations_by_source: dict[str, int]) -> int:
    """Citation count across sources: take the max, missing counts as 0."""
    return max(citations_by_source.values(), default=0)
