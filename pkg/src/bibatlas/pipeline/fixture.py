"""Synthetic offline workspace generator.

Builds a small but fully featured corpus: three venues, planted topical
clusters with cross-cluster bridges, duplicate records in a secondary
source, identity quirks (ORCID-only refs, a name-variant alias), paper
vectors with a dominant shared direction for the whitener to remove, and
a 2-D projection with drifting authors. Everything derives from one
seeded generator, so the same seed always yields byte-identical files.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import yaml

from bibatlas.corpus.normalize import surname_and_initial
from bibatlas.embedding.io import save_vectors_columnar
from bibatlas.ioutil import atomic_write_text, write_json, write_jsonl

VENUES = ("netsci-letters", "text-systems", "vision-quarterly")
N_COMMUNITIES = 6
GIVEN = (
    "Ada", "Boris", "Chen", "Dara", "Elif", "Farid", "Greta", "Hiro",
    "Iris", "Jonas", "Kira", "Liam", "Mei", "Noor", "Odin", "Priya",
    "Quinn", "Rosa", "Sven", "Tara",
)
SURNAME_A = (
    "Ander", "Berg", "Castel", "Dvor", "Ek", "Fonta", "Grim", "Holm",
    "Ivers", "Jans", "Karls", "Lind", "Moren", "Nords", "Orte", "Pears",
    "Quist", "Rosen", "Strand", "Thorn",
)
SURNAME_B = ("sen", "berg", "mark", "feld", "gren", "holt", "dahl", "vik", "lund")
VOCAB = (
    ("community", "detection", "modular", "networks", "partitions", "resolution",
     "clustering", "graphs", "dynamics", "percolation"),
    ("citation", "impact", "bibliometric", "indicators", "rankings", "scholarly",
     "metrics", "careers", "productivity", "collaboration"),
    ("language", "parsing", "semantic", "corpus", "embeddings", "syntax",
     "translation", "discourse", "lexical", "annotation"),
    ("retrieval", "indexing", "queries", "relevance", "search", "documents",
     "ranking", "summarization", "topics", "evaluation"),
    ("vision", "segmentation", "recognition", "images", "convolutional",
     "features", "detection", "scenes", "textures", "tracking"),
    ("learning", "optimization", "gradient", "inference", "bayesian",
     "regularization", "kernels", "sampling", "estimation", "generalization"),
)


def _author_name(i: int) -> str:
    surname = SURNAME_A[i % len(SURNAME_A)] + SURNAME_B[i // len(SURNAME_A) % len(SURNAME_B)]
    return f"{GIVEN[i % len(GIVEN)]} {surname}{'' if i < 180 else i}"


def _title(rng: np.random.Generator, community: int, code: int) -> str:
    vocab = VOCAB[community]
    k = int(rng.integers(4, 7))
    words = [vocab[int(j)] for j in rng.choice(len(vocab), size=k, replace=False)]
    return " ".join(words).capitalize() + f" {code:03d}"


def make_fixture(
    ws,
    seed: int = 1337,
    n_authors: int = 90,
    n_years: int = 25,
    start_year: int = 2000,
) -> list[str]:
    rng = np.random.default_rng(seed)
    root = Path(ws.root)
    written: list[str] = []

    community_of = [i * N_COMMUNITIES // n_authors for i in range(n_authors)]
    members_of: dict[int, list[int]] = {c: [] for c in range(N_COMMUNITIES)}
    for i, c in enumerate(community_of):
        members_of[c].append(i)

    def ref(i: int, drop_upstream: bool = False, drop_all_ids: bool = False) -> dict:
        has_orcid = i % 3 != 0
        r: dict = {"name": _author_name(i)}
        if not drop_all_ids:
            if not drop_upstream:
                r["id"] = f"A{i:04d}"
            if has_orcid:
                r["orcid"] = f"0000-0002-{i:04d}-{(i * 7) % 10000:04d}"
        return r

    # Authors who sometimes appear without any machine id; an alias table
    # entry folds the resulting name key back into the upstream key.
    alias_author = 6

    papers = []
    code = 0
    for yi in range(n_years):
        year = start_year + yi
        for _ in range(6 + yi // 3):
            code += 1
            c = int(rng.integers(0, N_COMMUNITIES))
            size = max(1, min(6, 1 + int(rng.poisson(1.7))))
            pool = members_of[c]
            take = min(size, len(pool))
            members = [pool[int(j)] for j in rng.choice(len(pool), size=take, replace=False)]
            if len(members) > 1 and rng.random() < 0.12:
                other = int(rng.integers(0, N_COMMUNITIES))
                stranger_pool = members_of[(c + max(1, other)) % N_COMMUNITIES]
                members[-1] = stranger_pool[int(rng.integers(0, len(stranger_pool)))]
            venue = VENUES[c // 2] if rng.random() >= 0.1 else VENUES[int(rng.integers(0, 3))]
            citations = int(rng.exponential(3.0 + 0.9 * (n_years - 1 - yi)))
            papers.append(
                {
                    "community": c,
                    "year": year,
                    "venue": venue,
                    "members": members,
                    "title": _title(rng, c, code),
                    "citations": citations,
                    "doi": f"10.5555/fx.{code:05d}" if rng.random() < 0.85 else None,
                    "has_abstract": bool(rng.random() < 0.65),
                }
            )

    # Bridge collaborations in the holdout era between far-apart clusters.
    for b in range(6):
        code += 1
        c = b % N_COMMUNITIES
        far = (c + 3) % N_COMMUNITIES
        a_pool, b_pool = members_of[c], members_of[far]
        papers.append(
            {
                "community": c,
                "year": start_year + n_years - 4 + (b % 4),
                "venue": VENUES[c // 2],
                "members": [a_pool[2 * b % len(a_pool)], b_pool[(3 * b + 1) % len(b_pool)]],
                "title": _title(rng, c, code),
                "citations": int(rng.exponential(2.0)),
                "doi": f"10.5555/fx.{code:05d}",
                "has_abstract": True,
            }
        )

    def raw_row(p: dict, source: str, pid: int) -> dict:
        refs = []
        for m in p["members"]:
            drop_upstream = source == "doi-registry" and m % 11 == 3
            drop_all = m == alias_author and pid % 4 == 1 and source == "primary-index"
            refs.append(ref(m, drop_upstream=drop_upstream, drop_all_ids=drop_all))
        row = {
            "source": source,
            "title": p["title"] if source == "primary-index" else p["title"].upper(),
            "year": p["year"],
            "venue_slug": p["venue"],
            "authors": refs,
            "doi": p["doi"],
            "citations": {
                source: p["citations"] + (2 if source == "doi-registry" else 0)
            },
        }
        if p["has_abstract"] and source == "primary-index":
            row["abstract"] = f"We study {p['title'].lower()}."
        return row

    by_venue: dict[str, list[dict]] = {v: [] for v in VENUES}
    dupes: list[dict] = []
    for pid, p in enumerate(papers):
        by_venue[p["venue"]].append(raw_row(p, "primary-index", pid))
        if p["venue"] == VENUES[0] and p["doi"] and pid % 8 == 0:
            dupes.append(raw_row(p, "doi-registry", pid))

    for venue in VENUES:
        rel = f"raw/{venue}-primary-index.jsonl"
        write_jsonl(root / rel, by_venue[venue])
        written.append(rel)
    rel = f"raw/{VENUES[0]}-doi-registry.jsonl"
    write_jsonl(root / rel, dupes)
    written.append(rel)

    # The alias table folds the bare-name variant of one author back in.
    surname, initial = surname_and_initial(_author_name(alias_author))
    write_json(
        root / "aliases.json",
        {
            "schema": "alias-v1",
            "aliases": [
                {
                    "from": f"name:{surname}_{initial}",
                    "to": f"upstream:A{alias_author:04d}",
                    "note": "fixture: bare-name variant of the same person",
                }
            ],
        },
    )
    written.append("aliases.json")

    # Paper vectors: cluster centers plus one strong shared direction that
    # whitening should strip; ids must match dedup's surrogate ids, which
    # depend only on (doi, title_norm, year).
    from bibatlas.corpus.models import paper_surrogate_id
    from bibatlas.corpus.normalize import normalize_doi, normalize_title

    dim_s, dim_c, dim_v = 64, 16, 8
    centers = rng.normal(size=(N_COMMUNITIES, dim_s))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    shared = rng.normal(size=dim_s)
    shared *= 1.2 / np.linalg.norm(shared)
    centers_c = rng.normal(size=(N_COMMUNITIES, dim_c))
    proj_centers = np.array(
        [
            [10.0 * np.cos(2 * np.pi * c / N_COMMUNITIES),
             10.0 * np.sin(2 * np.pi * c / N_COMMUNITIES)]
            for c in range(N_COMMUNITIES)
        ]
    )

    specter: dict[str, np.ndarray] = {}
    concepts: dict[str, np.ndarray] = {}
    venue_vecs: dict[str, np.ndarray] = {}
    projection: dict[str, np.ndarray] = {}
    year_hi = start_year + n_years - 1
    for p in papers:
        pid = paper_surrogate_id(
            normalize_doi(p["doi"]), normalize_title(p["title"]), p["year"]
        )
        c = p["community"]
        specter[pid] = centers[c] + 0.45 * rng.normal(size=dim_s) + shared
        if rng.random() >= 0.08:
            concepts[pid] = centers_c[c] + 0.3 * rng.normal(size=dim_c)
        vvec = 0.1 * rng.normal(size=dim_v)
        vvec[VENUES.index(p["venue"])] += 0.9
        venue_vecs[pid] = vvec
        xy = proj_centers[c] + 1.2 * rng.normal(size=2)
        lead = p["members"][0]
        if lead % 10 == 7:
            frac = (p["year"] - start_year) / max(1, n_years - 1)
            target = proj_centers[(community_of[lead] + 3) % N_COMMUNITIES]
            xy = (1 - frac) * xy + frac * (target + 1.2 * rng.normal(size=2))
        projection[pid] = xy

    for rel, vectors in (
        ("embedding/specter.npz", specter),
        ("embedding/concepts.npz", concepts),
        ("embedding/venue_lda.npz", venue_vecs),
        ("embedding/projection.npz", projection),
    ):
        save_vectors_columnar(root / rel, vectors)
        written.append(rel)

    config = {
        "seed": seed,
        "venues": [
            {"slug": venue, "issns": [f"1000-{1000 + i:04d}"]}
            for i, venue in enumerate(VENUES)
        ],
        "phantom": {"cutoff_year": year_hi - 5, "horizon": year_hi + 1},
        "communities": {"min_island_size": 5},
    }
    atomic_write_text(root / "config.yaml", yaml.safe_dump(config, sort_keys=True))
    written.append("config.yaml")
    return written
