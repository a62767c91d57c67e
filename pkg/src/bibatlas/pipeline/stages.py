"""Staged pipeline execution with digest-based skipping.

Each stage declares the files it reads and produces. A stage reruns only
when its config slice, an input digest, or an output file changed; a
rerun with nothing changed touches nothing, which is what makes repeat
runs byte-identical. Manifests under manifests/ record the evidence.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from bibatlas import descriptive as desc
from bibatlas import trajectories as traj
from bibatlas.communities.compare import ari, nmi, vi
from bibatlas.communities.labels import keyword_labels
from bibatlas.communities.leiden import Partition, leiden, merge_islands
from bibatlas.corpus.audit import audit_split_candidates
from bibatlas.corpus.dedup import dedup
from bibatlas.corpus.identity import (
    apply_aliases,
    build_identities,
    load_alias_table,
    merge_by_orcid,
    reconcile_citations,
    remap_paper_authors,
    resolve_alias_chain,
)
from bibatlas.corpus.models import PaperRecord, RawRecord
from bibatlas.embedding.hybrid import (
    BlockVectors,
    TrivialCentroidError,
    author_specter_centroid,
    hybrid_concat,
)
from bibatlas.embedding.io import load_vectors, save_vectors_columnar
from bibatlas.embedding.whitening import apply_whitening_matrix, fit_whitening
from bibatlas.graphs.build import (
    build_coauthor,
    giant_component_series,
    multiplex_merge,
    mutual_knn,
)
from bibatlas.graphs.core import WeightedGraph, load_graph, save_graph
from bibatlas.graphs.metrics import network_diagnostics
from bibatlas.harvest.client import backfill_abstracts, fetch_venue, resolve_venue
from bibatlas.harvest.models import Checkpoint, VenueSpec
from bibatlas.harvest.transport import (
    PermanentHttpError,
    RateLimiter,
    RequestsTransport,
    TransientHttpError,
)
from bibatlas.ioutil import read_json, read_jsonl, sha256_file, write_json, write_jsonl
from bibatlas.phantom.evaluate import evaluate as phantom_evaluate
from bibatlas.phantom.split import make_split
from bibatlas.pipeline.config import ConfigError, PipelineConfig

log = logging.getLogger(__name__)

STAGE_ORDER = (
    "harvest",
    "dedup",
    "resolve",
    "embed",
    "graphs",
    "communities",
    "phantom",
    "trajectories",
    "describe",
    "export",
)

# Workspace-relative artifact paths.
RAW_DIR = "raw"
PAPERS = "corpus/papers.jsonl"
RECORD_MAP = "corpus/record_map.json"
PAPERS_RESOLVED = "corpus/papers_resolved.jsonl"
IDENTITIES = "corpus/identities.jsonl"
AUDIT = "corpus/audit.json"
ALIASES = "aliases.json"
SPECTER = "embedding/specter.npz"
CONCEPTS = "embedding/concepts.npz"
VENUE_LDA = "embedding/venue_lda.npz"
PROJECTION = "embedding/projection.npz"
AUTHOR_LAYOUT = "layout/authors.npz"
WHITENING = "embedding/whitening.json"
HYBRID = "embedding/papers_hybrid.npz"
AUTHOR_VECS = "embedding/authors_hybrid.npz"
AUTHOR_META = "embedding/authors_meta.jsonl"
COAUTHOR_NODES = "graphs/coauthor-nodes.jsonl"
COAUTHOR_EDGES = "graphs/coauthor-edges.jsonl"
SEMANTIC_NODES = "graphs/semantic-nodes.jsonl"
SEMANTIC_EDGES = "graphs/semantic-edges.jsonl"
MULTIPLEX_NODES = "graphs/multiplex-nodes.jsonl"
MULTIPLEX_EDGES = "graphs/multiplex-edges.jsonl"
DIAGNOSTICS = "graphs/diagnostics.json"
PART_COAUTHOR = "communities/coauthor.json"
PART_SEMANTIC = "communities/semantic.json"
PART_MULTIPLEX = "communities/multiplex.json"
LABELS = "communities/labels.json"
ALIGNMENT = "communities/alignment.json"
PHANTOM_REPORT = "phantom/report.json"
PHANTOM_D2 = "phantom/report_d2.json"
TRAJECTORIES = "trajectories/trajectories.jsonl"
TRAJ_SUMMARY = "trajectories/summary.json"
DESCRIPTIVE = "descriptive/report.json"


class StageError(RuntimeError):
    exit_code = 1

    def __init__(self, stage: str, message: str) -> None:
        super().__init__(f"stage {stage}: {message}")
        self.stage = stage


class StaleInputError(StageError):
    exit_code = 3


class UpstreamApiError(StageError):
    exit_code = 4


@dataclass
class StageResult:
    name: str
    ran: bool
    reason: str
    outputs: dict[str, str] = field(default_factory=dict)


class Workspace:
    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)

    def path(self, rel: str) -> Path:
        return self.root / rel

    def exists(self, rel: str) -> bool:
        return self.path(rel).exists()

    def manifest_path(self, stage: str) -> Path:
        return self.root / "manifests" / f"{stage}.json"

    def read_manifest(self, stage: str) -> dict | None:
        path = self.manifest_path(stage)
        return read_json(path) if path.exists() else None

    def raw_files(self, config: PipelineConfig | None = None) -> list[str]:
        raw = self.path(RAW_DIR)
        if raw.is_dir():
            return sorted(f"{RAW_DIR}/{p.name}" for p in raw.glob("*.jsonl"))
        return []


def _producer_of(rel: str) -> str | None:
    table = (
        (f"{RAW_DIR}/", "harvest"),
        (PAPERS, "dedup"),
        (RECORD_MAP, "dedup"),
        ("corpus/", "resolve"),
        (WHITENING, "embed"),
        (HYBRID, "embed"),
        (AUTHOR_VECS, "embed"),
        (AUTHOR_META, "embed"),
        ("graphs/", "graphs"),
        ("communities/", "communities"),
        ("phantom/", "phantom"),
        ("trajectories/", "trajectories"),
        ("descriptive/", "describe"),
        ("bundle/", "export"),
    )
    for prefix, stage in table:
        if rel == prefix or (prefix.endswith("/") and rel.startswith(prefix)):
            return stage
    return None


def _load_papers(ws: Workspace, rel: str, stage: str) -> list[PaperRecord]:
    rows, _ = read_jsonl(ws.path(rel))
    return [PaperRecord.from_dict(row) for row in rows]


def _read_raw_records(ws: Workspace, files: list[str]) -> list[RawRecord]:
    records: list[RawRecord] = []
    for rel in files:
        rows, _ = read_jsonl(ws.path(rel))
        records.extend(RawRecord.from_dict(row) for row in rows)
    return records


def _meta(stage: str, config: PipelineConfig, **extra) -> dict:
    return {"stage": stage, "config_digest": config.digest(), **extra}


# ---------------------------------------------------------------- stages


def _harvest_inputs(ws: Workspace, config: PipelineConfig) -> list[str]:
    return []


def _harvest_run(ws: Workspace, config: PipelineConfig) -> list[str]:
    venues = config["venues"]
    if not config["harvest.enabled"]:
        files = ws.raw_files()
        missing = [
            f"{RAW_DIR}/{v['slug']}-primary-index.jsonl"
            for v in venues
            if not ws.exists(f"{RAW_DIR}/{v['slug']}-primary-index.jsonl")
        ]
        if not files or missing:
            raise StaleInputError(
                "harvest",
                "harvest.enabled is false and raw records are absent; place "
                f"JSONL files under {RAW_DIR}/ (the make-fixture subcommand "
                "generates a synthetic set) or enable harvesting",
            )
        return files
    if not venues:
        raise ConfigError("harvest.enabled requires a non-empty venue list")
    mailto = config["harvest.mailto"]
    agent = f"bibatlas/0.1 (mailto:{mailto})" if mailto else "bibatlas/0.1"
    transport = RequestsTransport(agent)
    limiter = RateLimiter(float(config["harvest.rate_per_second"]))
    try:
        for venue in venues:
            spec = VenueSpec.from_dict(venue)
            if spec.source_id is None:
                spec = resolve_venue(spec, transport, limiter, mailto=mailto)
            rel = f"{RAW_DIR}/{spec.slug}-primary-index.jsonl"
            ckpt_path = ws.path(f"{RAW_DIR}/checkpoints/{spec.slug}.json")
            ckpt = (
                Checkpoint.load(ckpt_path)
                if ckpt_path.exists()
                else Checkpoint(venue_slug=spec.slug)
            )
            fetch_venue(
                spec,
                ckpt,
                transport,
                limiter,
                ws.path(rel),
                ckpt_path,
                per_page=int(config["harvest.per_page"]),
                mailto=mailto,
            )
        if config["harvest.ieee.enabled"]:
            ieee_limiter = RateLimiter(float(config["harvest.ieee.rate_per_second"]))
            for slug in config["harvest.ieee.venues"]:
                rel = f"{RAW_DIR}/{slug}-primary-index.jsonl"
                if not ws.exists(rel):
                    continue
                rows, _ = read_jsonl(ws.path(rel))
                records = [RawRecord.from_dict(r) for r in rows]
                stats = backfill_abstracts(
                    records,
                    transport,
                    ieee_limiter,
                    ceiling=int(config["harvest.ieee.ceiling"]),
                )
                write_jsonl(ws.path(rel), (r.to_dict() for r in records))
                log.info("ieee backfill %s: %s", slug, stats.get(slug))
    except (TransientHttpError, PermanentHttpError) as exc:
        raise UpstreamApiError("harvest", str(exc)) from exc
    return ws.raw_files()


def _dedup_inputs(ws: Workspace, config: PipelineConfig) -> list[str]:
    return ws.raw_files(config)


def _dedup_run(ws: Workspace, config: PipelineConfig) -> list[str]:
    files = ws.raw_files()
    if not files:
        raise StaleInputError("dedup", "no raw records; run the 'harvest' stage first")
    records = _read_raw_records(ws, files)
    papers, record_to_paper = dedup(
        records,
        ratio_threshold=int(config["dedup.ratio_threshold"]),
        min_surname_overlap=int(config["dedup.min_surname_overlap"]),
    )
    write_jsonl(
        ws.path(PAPERS),
        (p.to_dict() for p in papers),
        meta=_meta(
            "dedup",
            config,
            schema="papers-v1",
            records_in=len(records),
            papers_out=len(papers),
        ),
    )
    write_json(
        ws.path(RECORD_MAP),
        {"schema": "record-map-v1", "files": files, "paper_ids": record_to_paper},
    )
    return [PAPERS, RECORD_MAP]


def _resolve_inputs(ws: Workspace, config: PipelineConfig) -> list[str]:
    return [PAPERS, RECORD_MAP] + ws.raw_files(config)


def _resolve_run(ws: Workspace, config: PipelineConfig) -> list[str]:
    papers = _load_papers(ws, PAPERS, "resolve")
    record_map = read_json(ws.path(RECORD_MAP))
    records = _read_raw_records(ws, record_map["files"])
    identities = build_identities(records, record_map["paper_ids"])
    identities, auto_map = merge_by_orcid(identities)
    user_table: dict[str, str] = {}
    if ws.exists(ALIASES):
        user_table = load_alias_table(ws.path(ALIASES))
        identities, user_flat = apply_aliases(identities, user_table)
    else:
        user_flat = {}

    def canonical(key: str) -> str:
        key = auto_map.get(key, key)
        return resolve_alias_chain(user_flat, key)

    mapping = {}
    for key in set(auto_map) | set(user_flat):
        mapping[key] = canonical(key)

    resolved: list[PaperRecord] = []
    for paper in papers:
        resolved.append(
            PaperRecord(
                paper_id=paper.paper_id,
                title=paper.title,
                title_norm=paper.title_norm,
                year=paper.year,
                venue_slug=paper.venue_slug,
                authors=remap_paper_authors(paper.authors, mapping),
                citations=reconcile_citations(paper.citations_by_source),
                doi=paper.doi,
                source_flags=paper.source_flags,
                citations_by_source=paper.citations_by_source,
            )
        )
    write_jsonl(
        ws.path(PAPERS_RESOLVED),
        (p.to_dict() for p in resolved),
        meta=_meta("resolve", config, schema="papers-v1", papers=len(resolved)),
    )
    write_jsonl(
        ws.path(IDENTITIES),
        (identities[k].to_dict() for k in sorted(identities)),
        meta=_meta(
            "resolve",
            config,
            schema="identities-v1",
            identities=len(identities),
            orcid_merges=len(auto_map),
            alias_merges=len(user_flat),
        ),
    )
    graph = build_coauthor(resolved, min_papers=int(config["graphs.min_papers_per_author"]))
    write_json(
        ws.path(AUDIT),
        {
            **_meta("resolve", config, schema="audit-v1"),
            "tiers": audit_split_candidates(identities, graph),
        },
    )
    return [PAPERS_RESOLVED, IDENTITIES, AUDIT]


def _embed_inputs(ws: Workspace, config: PipelineConfig) -> list[str]:
    return [PAPERS_RESOLVED, SPECTER]


def _unit_rows(mat: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(mat, axis=1, keepdims=True)
    safe = np.where(norms > 0, norms, 1.0)
    return mat / safe


def _embed_run(ws: Workspace, config: PipelineConfig) -> list[str]:
    papers = _load_papers(ws, PAPERS_RESOLVED, "embed")
    specter = load_vectors(ws.path(SPECTER))
    ids = sorted(pid for pid in specter if pid in {p.paper_id for p in papers})
    if len(ids) < 2:
        raise StageError("embed", "need at least 2 papers with vectors")
    subset = {pid: specter[pid] for pid in ids}
    model = fit_whitening(subset)
    model.save(ws.path(WHITENING))
    white = apply_whitening_matrix(
        np.asarray([subset[pid] for pid in ids], dtype=np.float64), model
    )
    white = _unit_rows(white)

    blocks: dict[str, dict[str, np.ndarray]] = {}
    dims = {"concepts": 0, "venue_lda": 0}
    for name, rel in (("concepts", CONCEPTS), ("venue_lda", VENUE_LDA)):
        if ws.exists(rel):
            vecs = load_vectors(ws.path(rel))
            blocks[name] = vecs
            dims[name] = len(next(iter(vecs.values()))) if vecs else 0
        else:
            blocks[name] = {}

    weights = (
        float(config["embedding.weights.specter"]),
        float(config["embedding.weights.concepts"]),
        float(config["embedding.weights.venue_lda"]),
    )
    def unit_or_zero(vec: np.ndarray) -> np.ndarray:
        norm = float(np.linalg.norm(vec))
        return vec / norm if norm > 0 else vec

    hybrid: dict[str, np.ndarray] = {}
    for i, pid in enumerate(ids):
        block = BlockVectors(
            owner=pid,
            specter=white[i],
            concept=unit_or_zero(blocks["concepts"].get(pid, np.zeros(dims["concepts"]))),
            venue=unit_or_zero(blocks["venue_lda"].get(pid, np.zeros(dims["venue_lda"]))),
        )
        try:
            hybrid[pid] = hybrid_concat(block, weights=weights).h
        except ValueError:
            log.warning("paper %s: all hybrid blocks zero, skipped", pid)
    save_vectors_columnar(ws.path(HYBRID), hybrid)

    min_papers = int(config["graphs.min_papers_per_author"])
    by_author: dict[str, list[PaperRecord]] = {}
    counts: dict[str, int] = {}
    for paper in papers:
        for key in set(paper.authors):
            counts[key] = counts.get(key, 0) + 1
            by_author.setdefault(key, []).append(paper)
    centroids: dict[str, np.ndarray] = {}
    meta_rows = []
    for key in sorted(by_author):
        if counts[key] < min_papers:
            continue
        contributions = [
            (hybrid[p.paper_id], p.citations)
            for p in by_author[key]
            if p.paper_id in hybrid
        ]
        if not contributions:
            meta_rows.append({"author_key": key, "status": "no-vectors"})
            continue
        years = [p.year for p in by_author[key] if p.paper_id in hybrid]
        try:
            centroids[key] = author_specter_centroid(contributions)
        except TrivialCentroidError:
            meta_rows.append({"author_key": key, "status": "trivial"})
            continue
        meta_rows.append(
            {
                "author_key": key,
                "status": "ok",
                "window": [min(years), max(years)],
                "papers": len(contributions),
            }
        )
    save_vectors_columnar(ws.path(AUTHOR_VECS), centroids)
    write_jsonl(
        ws.path(AUTHOR_META),
        meta_rows,
        meta=_meta("embed", config, schema="author-centroids-v1", authors=len(centroids)),
    )
    return [WHITENING, HYBRID, AUTHOR_VECS, AUTHOR_META]


def _graphs_inputs(ws: Workspace, config: PipelineConfig) -> list[str]:
    return [PAPERS_RESOLVED, HYBRID, AUTHOR_VECS]


def _graphs_run(ws: Workspace, config: PipelineConfig) -> list[str]:
    papers = _load_papers(ws, PAPERS_RESOLVED, "graphs")
    coauthor = build_coauthor(
        papers, min_papers=int(config["graphs.min_papers_per_author"])
    )
    author_vecs = load_vectors(ws.path(AUTHOR_VECS))

    semantic_vecs = {k: v for k, v in author_vecs.items() if k in coauthor}
    semantic = (
        mutual_knn(semantic_vecs, k=int(config["embedding.paper_knn_k"]))
        if len(semantic_vecs) >= 2
        else WeightedGraph(layer="semantic-knn")
    )
    semantic.layer = "semantic-knn"
    for key in coauthor.nodes:
        if key not in semantic:
            semantic.add_node(key)

    multiplex = multiplex_merge(
        coauthor,
        author_vecs,
        alpha=float(config["multiplex.alpha"]),
        tau_s=float(config["multiplex.tau_s"]),
        k=int(config["embedding.author_knn_k"]),
    )

    thresholds = {
        "base_threshold": int(config["graphs.base_threshold"]),
        "giant_threshold": int(config["graphs.giant_threshold"]),
    }
    extra = _meta("graphs", config, **thresholds)
    save_graph(coauthor, ws.path(COAUTHOR_NODES), ws.path(COAUTHOR_EDGES), extra_meta=extra)
    save_graph(semantic, ws.path(SEMANTIC_NODES), ws.path(SEMANTIC_EDGES), extra_meta=extra)
    save_graph(
        multiplex, ws.path(MULTIPLEX_NODES), ws.path(MULTIPLEX_EDGES), extra_meta=extra
    )

    years = sorted({p.year for p in papers})
    series = giant_component_series(
        papers, years, min_papers=int(config["graphs.min_papers_per_author"])
    )
    diagnostics = {
        **_meta("graphs", config, schema="diagnostics-v1"),
        "coauthor": network_diagnostics(coauthor, seed=int(config["seed"])),
        "giant_series": {
            "years": years,
            "fraction": [series[y] for y in years],
        },
    }
    write_json(ws.path(DIAGNOSTICS), diagnostics)
    return [
        COAUTHOR_NODES,
        COAUTHOR_EDGES,
        SEMANTIC_NODES,
        SEMANTIC_EDGES,
        MULTIPLEX_NODES,
        MULTIPLEX_EDGES,
        DIAGNOSTICS,
    ]


def _communities_inputs(ws: Workspace, config: PipelineConfig) -> list[str]:
    return [
        PAPERS_RESOLVED,
        COAUTHOR_NODES,
        COAUTHOR_EDGES,
        SEMANTIC_NODES,
        SEMANTIC_EDGES,
        MULTIPLEX_NODES,
        MULTIPLEX_EDGES,
    ]


def _partition_graph(
    graph: WeightedGraph,
    resolution: float,
    seed: int,
    min_island: int,
    extra_provenance: dict,
) -> Partition:
    part = leiden(graph, resolution=resolution, seed=seed)
    part = merge_islands(part, graph, min_size=min_island)
    part.meta.update(extra_provenance)
    return part


def _communities_run(ws: Workspace, config: PipelineConfig) -> list[str]:
    papers = _load_papers(ws, PAPERS_RESOLVED, "communities")
    seed = int(config["communities.seed"])
    min_island = int(config["communities.min_island_size"])
    res = config["communities.resolutions"]

    coauthor = load_graph(ws.path(COAUTHOR_NODES), ws.path(COAUTHOR_EDGES))
    threshold = int(config["communities.coauthor_edge_threshold"])
    community_graph = coauthor.subgraph_min_weight(threshold)
    provenance = {
        "coauthor_edge_threshold": threshold,
        "base_threshold": int(config["graphs.base_threshold"]),
        "giant_threshold": int(config["graphs.giant_threshold"]),
    }
    parts = {
        PART_COAUTHOR: _partition_graph(
            community_graph, float(res["coauthor"]), seed, min_island, provenance
        ),
        PART_SEMANTIC: _partition_graph(
            load_graph(ws.path(SEMANTIC_NODES), ws.path(SEMANTIC_EDGES)),
            float(res["semantic"]),
            seed,
            min_island,
            {},
        ),
        PART_MULTIPLEX: _partition_graph(
            load_graph(ws.path(MULTIPLEX_NODES), ws.path(MULTIPLEX_EDGES)),
            float(res["multiplex"]),
            seed,
            min_island,
            {},
        ),
    }
    for rel, part in parts.items():
        part.save(ws.path(rel))

    named = {
        "coauthor": parts[PART_COAUTHOR],
        "semantic": parts[PART_SEMANTIC],
        "multiplex": parts[PART_MULTIPLEX],
    }
    labels = {}
    for name, part in named.items():
        labels[name] = [
            {
                "community_id": lab.community_id,
                "top_terms": [[term, score] for term, score in lab.top_terms],
                "exemplar_authors": lab.exemplar_authors,
            }
            for _, lab in sorted(keyword_labels(part, papers).items())
        ]
    write_json(
        ws.path(LABELS),
        {**_meta("communities", config, schema="labels-v1"), "layers": labels},
    )
    pairs = []
    order = ["coauthor", "semantic", "multiplex"]
    for i in range(len(order)):
        for j in range(i + 1, len(order)):
            a, b = named[order[i]], named[order[j]]
            common = set(a.assignment) & set(b.assignment)
            pa = {k: a.assignment[k] for k in common}
            pb = {k: b.assignment[k] for k in common}
            pairs.append(
                {
                    "a": order[i],
                    "b": order[j],
                    "nodes": len(common),
                    "nmi": nmi(pa, pb),
                    "ari": ari(pa, pb),
                    "vi": vi(pa, pb),
                }
            )
    counts = {
        name: {
            "mainland": len(part.sizes()) - (0 if part.misc_bucket is None else 1),
            "total": len(part.sizes()),
            "misc_size": part.sizes().get(part.misc_bucket, 0),
        }
        for name, part in named.items()
    }
    write_json(
        ws.path(ALIGNMENT),
        {
            **_meta("communities", config, schema="alignment-v1"),
            "pairs": pairs,
            "community_counts": counts,
        },
    )
    return [PART_COAUTHOR, PART_SEMANTIC, PART_MULTIPLEX, LABELS, ALIGNMENT]


def _phantom_inputs(ws: Workspace, config: PipelineConfig) -> list[str]:
    return [PAPERS_RESOLVED, SPECTER]


def _phantom_run(ws: Workspace, config: PipelineConfig) -> list[str]:
    papers = _load_papers(ws, PAPERS_RESOLVED, "phantom")
    specter = load_vectors(ws.path(SPECTER))
    try:
        split = make_split(
            papers,
            specter,
            cutoff_year=int(config["phantom.cutoff_year"]),
            horizon=int(config["phantom.horizon"]),
            min_train_papers=int(config["graphs.min_papers_per_author"]),
            graph_min_papers=int(config["graphs.min_papers_per_author"]),
        )
    except ValueError as exc:
        raise StageError("phantom", str(exc)) from exc
    k_list = tuple(int(k) for k in config["phantom.k_list"])
    seed = int(config["seed"])
    gate = int(config["phantom.min_distance"])
    write_json(ws.path(PHANTOM_REPORT), phantom_evaluate(split, k_list, gate, seed))
    write_json(ws.path(PHANTOM_D2), phantom_evaluate(split, k_list, 2, seed))
    return [PHANTOM_REPORT, PHANTOM_D2]


def _trajectories_inputs(ws: Workspace, config: PipelineConfig) -> list[str]:
    return [PAPERS_RESOLVED, PROJECTION]


def _trajectories_run(ws: Workspace, config: PipelineConfig) -> list[str]:
    papers = _load_papers(ws, PAPERS_RESOLVED, "trajectories")
    proj = load_vectors(ws.path(PROJECTION))
    coords = {}
    for pid, vec in proj.items():
        if vec.shape != (2,):
            raise StageError("trajectories", f"projection for {pid} is not 2-D")
        coords[pid] = (float(vec[0]), float(vec[1]))
    trajectories = traj.build_trajectories(
        papers,
        coords,
        min_bins=int(config["trajectories.min_bins"]),
        tau_stay=float(config["trajectories.tau_stay"]),
        tau_eta=float(config["trajectories.tau_eta"]),
        tau_net=float(config["trajectories.tau_net"]),
    )
    write_jsonl(
        ws.path(TRAJECTORIES),
        (t.to_dict() for t in trajectories),
        meta=_meta(
            "trajectories", config, schema="trajectories-v1", count=len(trajectories)
        ),
    )
    summary_min = int(config["trajectories.summary_min_bins"])
    shares_all = {k: 0 for k in traj.CLASSES}
    for t in trajectories:
        shares_all[t.klass] += 1
    write_json(
        ws.path(TRAJ_SUMMARY),
        {
            **_meta("trajectories", config, schema="trajectory-summary-v1"),
            "count": len(trajectories),
            "class_counts": shares_all,
            "summary_min_bins": summary_min,
            "class_summary": traj.class_summary(trajectories, min_bins=summary_min),
        },
    )
    return [TRAJECTORIES, TRAJ_SUMMARY]


def _describe_inputs(ws: Workspace, config: PipelineConfig) -> list[str]:
    return [PAPERS_RESOLVED]


def _describe_run(ws: Workspace, config: PipelineConfig) -> list[str]:
    from bibatlas.pipeline import reports

    papers = _load_papers(ws, PAPERS_RESOLVED, "describe")
    growth = desc.growth_series(papers)
    team = desc.team_size_series(papers)
    counts = desc.author_paper_counts(papers)
    try:
        alpha, intercept, r2 = desc.lotka_fit(counts)
        lotka = {"alpha": alpha, "intercept": intercept, "r_squared": r2}
    except ValueError as exc:
        lotka = {"error": str(exc)}
    venues = {slug: vs.to_dict() for slug, vs in desc.venue_stats(papers).items()}
    spans = sorted(desc.career_spans(papers).values())
    report = {
        **_meta("describe", config, schema="descriptive-v1"),
        "growth": growth,
        "team_size": team,
        "lotka": lotka,
        "venues": venues,
        "top_contributors": desc.top_contributors(papers),
        "most_cited": desc.most_cited(papers),
        "median_career_span": (
            spans[(len(spans) + 1) // 2 - 1] if spans else None
        ),
        "papers": len(papers),
        "authors": len(counts),
    }
    write_json(ws.path(DESCRIPTIVE), report)
    outputs = [DESCRIPTIVE]
    outputs += reports.write_tables(ws.root / "descriptive", report, counts)
    outputs += reports.render_figures(ws.root / "descriptive" / "figures", report, counts)
    return outputs


def _export_inputs(ws: Workspace, config: PipelineConfig) -> list[str]:
    return [
        PAPERS_RESOLVED,
        IDENTITIES,
        COAUTHOR_NODES,
        COAUTHOR_EDGES,
        SEMANTIC_NODES,
        SEMANTIC_EDGES,
        MULTIPLEX_NODES,
        MULTIPLEX_EDGES,
        PART_COAUTHOR,
        PART_SEMANTIC,
        PART_MULTIPLEX,
        LABELS,
        ALIGNMENT,
        PHANTOM_REPORT,
        PHANTOM_D2,
        TRAJECTORIES,
        TRAJ_SUMMARY,
        DESCRIPTIVE,
        PROJECTION,
    ]


def _export_run(ws: Workspace, config: PipelineConfig) -> list[str]:
    from bibatlas.pipeline.export import export_bundle

    return export_bundle(ws, config)


@dataclass(frozen=True)
class StageSpec:
    name: str
    inputs: Callable[[Workspace, PipelineConfig], list[str]]
    run: Callable[[Workspace, PipelineConfig], list[str]]
    optional_inputs: tuple[str, ...] = ()


STAGES: dict[str, StageSpec] = {
    "harvest": StageSpec("harvest", _harvest_inputs, _harvest_run),
    "dedup": StageSpec("dedup", _dedup_inputs, _dedup_run),
    "resolve": StageSpec("resolve", _resolve_inputs, _resolve_run, (ALIASES,)),
    "embed": StageSpec("embed", _embed_inputs, _embed_run, (CONCEPTS, VENUE_LDA)),
    "graphs": StageSpec("graphs", _graphs_inputs, _graphs_run),
    "communities": StageSpec("communities", _communities_inputs, _communities_run),
    "phantom": StageSpec("phantom", _phantom_inputs, _phantom_run),
    "trajectories": StageSpec("trajectories", _trajectories_inputs, _trajectories_run),
    "describe": StageSpec("describe", _describe_inputs, _describe_run),
    "export": StageSpec("export", _export_inputs, _export_run, (AUTHOR_LAYOUT,)),
}


def _input_digests(
    ws: Workspace, spec: StageSpec, config: PipelineConfig
) -> dict[str, str | None]:
    digests: dict[str, str | None] = {}
    for rel in spec.inputs(ws, config):
        path = ws.path(rel)
        if not path.exists():
            producer = _producer_of(rel)
            hint = (
                f"run the '{producer}' stage first"
                if producer
                else "provide it (external input; see make-fixture)"
            )
            raise StaleInputError(spec.name, f"missing input {rel}; {hint}")
        digests[rel] = sha256_file(path)
    for rel in spec.optional_inputs:
        digests[rel] = sha256_file(ws.path(rel)) if ws.exists(rel) else None
    return digests


def _check_upstream_fresh(ws: Workspace, spec: StageSpec, digests: dict) -> None:
    """A consumed artifact must match what its producer's manifest recorded;
    anything else means the producer needs to rerun."""
    for rel, digest in digests.items():
        if digest is None:
            continue
        producer = _producer_of(rel)
        if producer is None or producer == spec.name:
            continue
        manifest = ws.read_manifest(producer)
        if manifest is None:
            raise StaleInputError(
                spec.name, f"input {rel} has no manifest; run the '{producer}' stage first"
            )
        recorded = manifest.get("outputs", {}).get(rel)
        if recorded != digest:
            raise StaleInputError(
                spec.name,
                f"input {rel} is stale (digest differs from the '{producer}' "
                "stage manifest); rerun that stage",
            )


def run_stage(
    ws: Workspace,
    config: PipelineConfig,
    name: str,
    force: bool = False,
    check_upstream: bool = True,
) -> StageResult:
    if name not in STAGES:
        raise ConfigError(f"unknown stage: {name}")
    spec = STAGES[name]
    in_digests = _input_digests(ws, spec, config)
    if check_upstream:
        _check_upstream_fresh(ws, spec, in_digests)
    scope = config.scope_digest(name)

    manifest = ws.read_manifest(name)
    if manifest and not force:
        outputs = manifest.get("outputs", {})
        fresh = (
            manifest.get("config_scope_digest") == scope
            and manifest.get("inputs") == in_digests
            and outputs
            and all(
                ws.exists(rel) and sha256_file(ws.path(rel)) == digest
                for rel, digest in outputs.items()
            )
        )
        if fresh:
            log.info("stage %s: inputs unchanged, skipped", name)
            return StageResult(name, ran=False, reason="unchanged", outputs=outputs)

    seed = int(config["seed"])
    random.seed(seed)
    np.random.seed(seed % (2**32))
    log.info("stage %s: running (seed %d)", name, seed)
    out_paths = spec.run(ws, config)
    out_digests = {rel: sha256_file(ws.path(rel)) for rel in out_paths}
    write_json(
        ws.manifest_path(name),
        {
            "schema": "stage-manifest-v1",
            "stage": name,
            "seed": seed,
            "config_digest": config.digest(),
            "config_scope_digest": scope,
            "inputs": in_digests,
            "outputs": out_digests,
        },
    )
    return StageResult(name, ran=True, reason="ran", outputs=out_digests)


def run(
    ws: Workspace,
    config: PipelineConfig,
    stages: list[str] | None = None,
    force: set[str] | None = None,
) -> list[StageResult]:
    """Run the requested stages (default: all) in dependency order."""
    force = force or set()
    requested = list(STAGE_ORDER) if stages is None else list(stages)
    for name in requested:
        if name not in STAGES:
            raise ConfigError(f"unknown stage: {name}")
    ordered = [s for s in STAGE_ORDER if s in requested]
    results = []
    for name in ordered:
        results.append(
            run_stage(ws, config, name, force=(name in force or "all" in force))
        )
    return results
