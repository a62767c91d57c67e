"""Split-identity audit: candidate pairs that may be one person.

Same-normalized-name groups spanning several keys are scored on shared
coauthors, ORCID patterns, and the edges a merge would restore, then
bucketed into confidence tiers. Institution data is not part of the record
schema, so the institutional conditions are skipped and the flag is absent.
"""

from __future__ import annotations

from collections import defaultdict
from itertools import combinations

from .models import AuthorIdentity
from .normalize import surname_and_initial

TIERS = ("high", "ambiguous-high", "moderate", "weak", "untiered")


def _normalized_name(ident: AuthorIdentity) -> str:
    surname, initial = surname_and_initial(ident.display_name)
    return f"{surname}_{initial}" if surname else ""


def _tier(shared: int, orcid_a: str | None, orcid_b: str | None) -> str | None:
    asymmetry = (orcid_a is None) != (orcid_b is None)
    both = orcid_a is not None and orcid_b is not None
    if asymmetry and shared >= 3:
        return "high"
    if both and orcid_a != orcid_b and shared >= 20:
        return "ambiguous-high"
    if shared >= 3:
        return "moderate"
    if shared == 2 and both:
        return "weak"
    if shared >= 2:
        return "untiered"
    return None


def audit_split_candidates(
    identities: dict[str, AuthorIdentity],
    coauthor_graph,
    min_group_papers: int = 5,
    display_threshold: float = 2.0,
) -> dict[str, list[dict]]:
    """Report possible split identities, grouped by confidence tier.

    A group qualifies when >= 2 keys normalize to the same name and at
    least one key holds >= min_group_papers papers. For each within-group
    pair the report gives the shared-coauthor count, the ORCID asymmetry
    flag, and the number of third-party coauthors whose combined weight
    with the pair would clear the display threshold even though neither
    key currently carries a displayable edge to them.
    """
    groups: dict[str, list[str]] = defaultdict(list)
    for key in sorted(identities):
        name = _normalized_name(identities[key])
        if name:
            groups[name].append(key)

    report: dict[str, list[dict]] = {tier: [] for tier in TIERS}
    for name in sorted(groups):
        keys = groups[name]
        if len(keys) < 2:
            continue
        if max(len(identities[k].paper_ids) for k in keys) < min_group_papers:
            continue
        for key_a, key_b in combinations(keys, 2):
            nbrs_a = dict(coauthor_graph.neighbors(key_a)) if key_a in coauthor_graph else {}
            nbrs_b = dict(coauthor_graph.neighbors(key_b)) if key_b in coauthor_graph else {}
            shared = sorted(set(nbrs_a) & set(nbrs_b) - {key_a, key_b})
            restored = 0
            for third in sorted(set(nbrs_a) | set(nbrs_b) - {key_a, key_b}):
                wa = nbrs_a.get(third, 0.0)
                wb = nbrs_b.get(third, 0.0)
                if wa + wb >= display_threshold and wa < display_threshold and wb < display_threshold:
                    restored += 1
            orcid_a = identities[key_a].orcid
            orcid_b = identities[key_b].orcid
            tier = _tier(len(shared), orcid_a, orcid_b)
            if tier is None:
                continue
            report[tier].append(
                {
                    "group_name": name,
                    "key_a": key_a,
                    "key_b": key_b,
                    "shared_coauthors": len(shared),
                    "orcid_asymmetry": (orcid_a is None) != (orcid_b is None),
                    "restored_edges": restored,
                }
            )
    for tier in TIERS:
        report[tier].sort(key=lambda c: (-c["shared_coauthors"], c["key_a"], c["key_b"]))
    return report
