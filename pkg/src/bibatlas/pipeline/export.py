"""Static JSON bundle for the browser atlas.

Every collection is a list of rows split greedily into chunk files no
larger than the configured byte budget; manifest.json indexes the chunks
and carries provenance digests for each upstream artifact. All iteration
orders are sorted, so two exports over identical inputs are byte-equal.
"""

from __future__ import annotations

import math
import shutil
from pathlib import Path

from bibatlas.communities.leiden import Partition
from bibatlas.corpus.models import AuthorIdentity, PaperRecord
from bibatlas.embedding.io import load_vectors
from bibatlas.graphs.core import load_graph
from bibatlas.ioutil import canonical_json, read_json, read_jsonl, sha256_file, write_json

from bibatlas.pipeline import stages as st

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


def _sunflower(n: int, radius: float) -> list[tuple[float, float]]:
    """n points filling a disc, densest-packing phyllotaxis pattern."""
    pts = []
    for i in range(n):
        r = radius * math.sqrt((i + 0.5) / n)
        theta = i * GOLDEN_ANGLE
        pts.append((r * math.cos(theta), r * math.sin(theta)))
    return pts


def fallback_layout(assignment: dict[str, int]) -> dict[str, tuple[float, float]]:
    """Deterministic circle-packed coordinates when no layout file exists.

    Communities become discs of area proportional to their size, placed on
    an outward phyllotaxis spiral (largest first); members fill each disc
    on the same pattern in sorted-key order.
    """
    groups: dict[int, list[str]] = {}
    for key in sorted(assignment):
        groups.setdefault(assignment[key], []).append(key)
    order = sorted(groups, key=lambda cid: (-len(groups[cid]), cid))
    radii = {cid: math.sqrt(len(groups[cid])) + 1.0 for cid in order}
    scale = sum(radii.values()) / math.sqrt(max(len(order), 1))
    coords: dict[str, tuple[float, float]] = {}
    for rank, cid in enumerate(order):
        if rank == 0:
            cx, cy = 0.0, 0.0
        else:
            d = scale * math.sqrt(rank) + radii[cid]
            theta = rank * GOLDEN_ANGLE
            cx, cy = d * math.cos(theta), d * math.sin(theta)
        for key, (dx, dy) in zip(groups[cid], _sunflower(len(groups[cid]), radii[cid] * 0.85)):
            coords[key] = (cx + dx, cy + dy)
    return coords


def _chunk_rows(rows: list, chunk_bytes: int) -> list[list]:
    chunks: list[list] = []
    current: list = []
    size = 2
    for row in rows:
        enc = len(canonical_json(row).encode("utf-8")) + 1
        if current and size + enc > chunk_bytes:
            chunks.append(current)
            current, size = [], 2
        current.append(row)
        size += enc
    chunks.append(current)
    return chunks


def _write_collection(
    out_dir: Path, name: str, rows: list, chunk_bytes: int
) -> tuple[list[str], dict]:
    files = []
    for i, chunk in enumerate(_chunk_rows(rows, chunk_bytes)):
        fname = f"{name}-{i:03d}.json"
        write_json(out_dir / fname, chunk)
        files.append(fname)
    return files, {"chunks": files, "rows": len(rows)}


def export_bundle(ws: "st.Workspace", config) -> list[str]:
    out_dir = ws.path("bundle")
    if out_dir.exists():
        shutil.rmtree(out_dir)
    out_dir.mkdir(parents=True)
    chunk_bytes = int(config["export.chunk_bytes"])

    papers = [
        PaperRecord.from_dict(row) for row in read_jsonl(ws.path(st.PAPERS_RESOLVED))[0]
    ]
    identities = {
        row["author_key"]: AuthorIdentity.from_dict(row)
        for row in read_jsonl(ws.path(st.IDENTITIES))[0]
    }
    coauthor = load_graph(ws.path(st.COAUTHOR_NODES), ws.path(st.COAUTHOR_EDGES))
    multiplex = load_graph(ws.path(st.MULTIPLEX_NODES), ws.path(st.MULTIPLEX_EDGES))
    _, coauthor_meta = read_jsonl(ws.path(st.COAUTHOR_NODES))
    base_threshold = int((coauthor_meta or {}).get("base_threshold", 2))
    parts = {
        "coauthor": Partition.load(ws.path(st.PART_COAUTHOR)),
        "semantic": Partition.load(ws.path(st.PART_SEMANTIC)),
        "multiplex": Partition.load(ws.path(st.PART_MULTIPLEX)),
    }

    if ws.exists(st.AUTHOR_LAYOUT):
        layout_vecs = load_vectors(ws.path(st.AUTHOR_LAYOUT))
        layout = {k: (float(v[0]), float(v[1])) for k, v in layout_vecs.items()}
        coordinate_source = "layout"
    else:
        layout = fallback_layout(parts["coauthor"].assignment)
        coordinate_source = "fallback"

    node_rows = []
    for key in coauthor.nodes:
        attrs = coauthor.node_attrs.get(key, {})
        x, y = layout.get(key, (0.0, 0.0))
        node_rows.append(
            {
                "id": key,
                "label": identities[key].display_name if key in identities else key,
                "x": round(x, 4),
                "y": round(y, 4),
                "papers": attrs.get("paper_count", 0),
                "citations": attrs.get("citations", 0),
                "first_year": attrs.get("first_year"),
                "last_year": attrs.get("last_year"),
                "communities": {
                    layer: parts[layer].assignment.get(key) for layer in parts
                },
            }
        )

    edge_rows = [
        {"source": a, "target": b, "w": w}
        for a, b, w in coauthor.edges()
        if w >= base_threshold
    ]
    mx_rows = [
        {"source": a, "target": b, "w": round(w, 6)} for a, b, w in multiplex.edges()
    ]

    proj = load_vectors(ws.path(st.PROJECTION)) if ws.exists(st.PROJECTION) else {}
    paper_rows = []
    for p in papers:
        vec = proj.get(p.paper_id)
        paper_rows.append(
            {
                "id": p.paper_id,
                "title": p.title,
                "year": p.year,
                "venue": p.venue_slug,
                "citations": p.citations,
                "authors": p.authors,
                "x": round(float(vec[0]), 4) if vec is not None else None,
                "y": round(float(vec[1]), 4) if vec is not None else None,
            }
        )
    paper_rows.sort(key=lambda r: r["id"])

    phantom_report = read_json(ws.path(st.PHANTOM_REPORT))
    phantom_d2 = read_json(ws.path(st.PHANTOM_D2))
    pair_rows = phantom_report["realized_pairs"]

    traj_rows = read_jsonl(ws.path(st.TRAJECTORIES))[0]
    traj_summary = read_json(ws.path(st.TRAJ_SUMMARY))
    descriptive = read_json(ws.path(st.DESCRIPTIVE))
    labels_doc = read_json(ws.path(st.LABELS))
    alignment = read_json(ws.path(st.ALIGNMENT))

    label_rows = [
        {"layer": layer, **row}
        for layer in sorted(labels_doc["layers"])
        for row in labels_doc["layers"][layer]
    ]

    collections = {}
    outputs = []
    for name, rows in (
        ("nodes", node_rows),
        ("edges_coauthor", edge_rows),
        ("edges_multiplex", mx_rows),
        ("papers", paper_rows),
        ("phantom_pairs", pair_rows),
        ("phantom_report", [phantom_report]),
        ("phantom_report_d2", [phantom_d2]),
        ("trajectories", traj_rows),
        ("trajectory_summary", [traj_summary]),
        ("descriptive", [descriptive]),
        ("labels", label_rows),
        ("alignment", [alignment]),
    ):
        files, entry = _write_collection(out_dir, name, rows, chunk_bytes)
        collections[name] = entry
        outputs.extend(f"bundle/{f}" for f in files)

    manifest = {
        "schema": "atlas-bundle-v1",
        "seed": int(config["seed"]),
        "config_digest": config.digest(),
        "chunk_bytes": chunk_bytes,
        "coordinate_source": coordinate_source,
        "counts": {
            "nodes": len(node_rows),
            "edges_coauthor": len(edge_rows),
            "edges_multiplex": len(mx_rows),
            "papers": len(paper_rows),
            "phantom_pairs": len(pair_rows),
            "trajectories": len(traj_rows),
        },
        "collections": collections,
        "provenance": {
            rel: sha256_file(ws.path(rel))
            for rel in st._export_inputs(ws, config)
            if ws.exists(rel)
        },
    }
    write_json(out_dir / "manifest.json", manifest)
    outputs.append("bundle/manifest.json")
    return outputs
