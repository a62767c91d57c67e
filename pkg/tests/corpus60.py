"""A 60-record ingest fixture: 42 distinct papers, 12 DOI duplicates,
6 fuzzy-title duplicates. Expected outcome: exactly 42 merged papers.

Distinct papers share at most three function words between any two
titles, keeping every cross-pair score well below the merge threshold,
so the only merges are the planted ones. Fuzzy duplicates keep the year
and the surnames (the blocking key) and vary the title by token
reorderings or stopword and suffix additions, all of which stay
token-subset or token-equal variants and therefore score 100.
"""

from __future__ import annotations

from bibatlas.corpus.models import AuthorRef, RawRecord

_ADJ = (
    "adaptive", "bayesian", "convex", "distributed", "efficient", "fast",
    "graphical", "hybrid", "incremental", "joint", "kernel", "latent",
    "modular", "neural", "online", "parallel", "quantized", "robust",
    "sparse", "temporal", "unified",
)
_NOUN = (
    "aggregation", "bounds", "clustering", "decoding", "estimation",
    "filtering", "hashing", "inference", "matching", "optimization",
    "prediction", "pruning", "ranking", "regression", "retrieval",
    "sampling", "scheduling", "segmentation", "tracking", "verification",
    "embedding",
)
_SURNAMES = (
    "Almeida", "Bergstrom", "Carvalho", "Dietrich", "Eriksson", "Fontaine",
    "Gruber", "Hoffmann", "Ibrahim", "Jansen", "Kowalski", "Lindqvist",
    "Moreau", "Novak", "Olsen", "Petrov", "Quintana", "Rosenberg",
    "Silva", "Takahashi", "Ueda",
)

# Base papers that receive a DOI duplicate (all carry DOIs: index % 3 != 2)
# and base papers that receive a fuzzy duplicate; the two sets are disjoint.
DOI_DUP_TARGETS = (0, 1, 3, 4, 6, 7, 9, 10, 18, 19, 21, 22)
FUZZY_DUP_TARGETS = (12, 13, 14, 15, 16, 17)


def _title(i: int) -> str:
    # The two noun slots use different residue schedules for the two
    # halves of the index range, so i and i + 21 share only the adjective.
    shift = 0 if i < 21 else 3
    return (
        f"{_ADJ[i % 21].capitalize()} {_NOUN[(i * 5 + shift) % 21]} for "
        f"{_NOUN[(i * 5 + shift + 7) % 21]} systems {i:02d}"
    )


def _ref(i: int, j: int = 0) -> AuthorRef:
    surname = _SURNAMES[(i * 3 + j) % len(_SURNAMES)]
    return AuthorRef(display_name=f"Pat {surname}", upstream_id=f"U{i:02d}{j}")


def _rec(title: str, year: int, i: int, doi: str | None, source: str,
         citations: int) -> RawRecord:
    return RawRecord(
        source=source,
        title=title,
        year=year,
        venue_slug="venue-a" if i % 2 == 0 else "venue-b",
        authors=[_ref(i), _ref(i, 1)],
        doi=doi,
        citations={source: citations},
    )


def fuzzy_variant(k: int, base_title: str) -> str:
    variants = (
        base_title + " (Extended Abstract)",
        base_title + " (extended abstract)",
        " ".join(reversed(base_title.split())),
        "A " + base_title,
        base_title + " Revisited Study Extended",
        " ".join(base_title.split()[::-1]),
    )
    return variants[k]


def build_records() -> tuple[list[RawRecord], int]:
    """Returns (records, expected_paper_count)."""
    records: list[RawRecord] = []
    titles = [_title(i) for i in range(42)]
    for i in range(42):
        doi = f"10.9999/base.{i:03d}" if i % 3 != 2 else None
        records.append(_rec(titles[i], 2010 + i % 7, i, doi, "primary-index", i))

    for i in DOI_DUP_TARGETS:
        records.append(
            _rec(
                titles[i].upper() + " [preprint]",
                2010 + i % 7,
                i,
                f"10.9999/base.{i:03d}",
                "doi-registry",
                i + 5,
            )
        )

    for k, i in enumerate(FUZZY_DUP_TARGETS):
        records.append(
            _rec(fuzzy_variant(k, titles[i]), 2010 + i % 7, i, None, "doi-registry", 1)
        )

    return records, 42
