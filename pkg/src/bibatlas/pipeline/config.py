"""Declarative pipeline configuration.

One YAML document covers every tunable. Unknown keys are rejected so a
typo cannot silently fall back to a default. Each stage hashes only the
slice of the config it actually reads, so changing, say, the community
seed reruns community detection and its consumers but nothing upstream.
"""

from __future__ import annotations

import copy
from pathlib import Path
from typing import Any

import yaml

from bibatlas.ioutil import canonical_json, sha256_text


class ConfigError(ValueError):
    """Invalid configuration; the CLI maps this to exit code 2."""


DEFAULTS: dict = {
    "seed": 1337,
    "venues": [],
    "harvest": {
        "enabled": False,
        "mailto": None,
        "per_page": 200,
        "rate_per_second": 8.0,
        "ieee": {
            "enabled": False,
            "rate_per_second": 5.0,
            "ceiling": 10000,
            "venues": [],
        },
    },
    "dedup": {
        "ratio_threshold": 95,
        "min_surname_overlap": 1,
    },
    "graphs": {
        "min_papers_per_author": 2,
        "base_threshold": 2,
        "giant_threshold": 5,
    },
    "embedding": {
        "weights": {"specter": 0.55, "concepts": 0.30, "venue_lda": 0.15},
        "paper_knn_k": 20,
        "author_knn_k": 5,
    },
    "multiplex": {
        "alpha": 0.5,
        "tau_s": 0.60,
    },
    "communities": {
        "seed": 42,
        "min_island_size": 10,
        "coauthor_edge_threshold": 2,
        "resolutions": {"coauthor": 1.0, "semantic": 1.0, "multiplex": 0.5},
    },
    "phantom": {
        "cutoff_year": 2019,
        "horizon": 2025,
        "k_list": [5, 10, 20],
        "min_distance": 3,
    },
    "trajectories": {
        "tau_stay": 15.0,
        "tau_eta": 0.60,
        "tau_net": 15.0,
        "min_bins": 2,
        "summary_min_bins": 3,
    },
    "export": {
        "chunk_bytes": 5 * 1024 * 1024,
    },
}

# Config slice each stage reads; the basis for stage-scoped digests.
STAGE_SCOPES: dict[str, tuple[str, ...]] = {
    "harvest": ("harvest", "venues"),
    "dedup": ("dedup",),
    "resolve": ("graphs.min_papers_per_author",),
    "embed": ("embedding.weights", "graphs.min_papers_per_author"),
    "graphs": (
        "graphs",
        "embedding.paper_knn_k",
        "embedding.author_knn_k",
        "multiplex",
        "seed",
    ),
    "communities": ("communities",),
    "phantom": ("phantom", "graphs.min_papers_per_author", "seed"),
    "trajectories": ("trajectories",),
    "describe": (),
    "export": ("export", "seed"),
}


def _merge(base: dict, override: dict, trail: str) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        here = f"{trail}.{key}" if trail else key
        if key not in base:
            raise ConfigError(f"unknown config key: {here}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{here}: expected a mapping")
            out[key] = _merge(base[key], value, here)
        else:
            out[key] = value
    return out


def _validate_venues(venues: Any) -> list[dict]:
    if not isinstance(venues, list):
        raise ConfigError("venues: expected a list")
    seen = set()
    out = []
    for i, entry in enumerate(venues):
        if not isinstance(entry, dict) or "slug" not in entry or "issns" not in entry:
            raise ConfigError(f"venues[{i}]: needs slug and issns")
        extra = set(entry) - {"slug", "issns", "source_id"}
        if extra:
            raise ConfigError(f"venues[{i}]: unknown keys {sorted(extra)}")
        if entry["slug"] in seen:
            raise ConfigError(f"venues[{i}]: duplicate slug {entry['slug']!r}")
        if not entry["issns"]:
            raise ConfigError(f"venues[{i}]: needs at least one ISSN")
        seen.add(entry["slug"])
        out.append(
            {
                "slug": str(entry["slug"]),
                "issns": [str(s) for s in entry["issns"]],
                **({"source_id": str(entry["source_id"])} if entry.get("source_id") else {}),
            }
        )
    return out


def _check_numbers(doc: dict) -> None:
    checks = [
        ("dedup.ratio_threshold", 0, 100),
        ("multiplex.alpha", 0.0, 1.0),
        ("multiplex.tau_s", -1.0, 1.0),
        ("trajectories.tau_eta", 0.0, 1.0),
    ]
    for path, lo, hi in checks:
        value = _dig(doc, path)
        if not isinstance(value, (int, float)) or not (lo <= value <= hi):
            raise ConfigError(f"{path}: expected a number in [{lo}, {hi}], got {value!r}")
    for path in (
        "seed",
        "harvest.per_page",
        "graphs.min_papers_per_author",
        "graphs.base_threshold",
        "graphs.giant_threshold",
        "embedding.paper_knn_k",
        "embedding.author_knn_k",
        "communities.min_island_size",
        "phantom.cutoff_year",
        "phantom.horizon",
        "phantom.min_distance",
        "trajectories.min_bins",
        "export.chunk_bytes",
    ):
        value = _dig(doc, path)
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            raise ConfigError(f"{path}: expected a non-negative integer, got {value!r}")
    ks = _dig(doc, "phantom.k_list")
    if (
        not isinstance(ks, list)
        or not ks
        or any(not isinstance(k, int) or k < 1 for k in ks)
    ):
        raise ConfigError("phantom.k_list: expected a non-empty list of positive integers")
    if _dig(doc, "phantom.horizon") <= _dig(doc, "phantom.cutoff_year"):
        raise ConfigError("phantom.horizon must exceed phantom.cutoff_year")
    weights = _dig(doc, "embedding.weights")
    if any(
        not isinstance(weights.get(name), (int, float)) or weights[name] <= 0
        for name in ("specter", "concepts", "venue_lda")
    ):
        raise ConfigError("embedding.weights: all three weights must be positive")


def _dig(doc: dict, path: str) -> Any:
    node: Any = doc
    for part in path.split("."):
        node = node[part]
    return node


class PipelineConfig:
    def __init__(self, doc: dict) -> None:
        self.doc = doc

    def __getitem__(self, path: str) -> Any:
        try:
            return _dig(self.doc, path)
        except KeyError:
            raise ConfigError(f"unknown config key: {path}") from None

    def digest(self) -> str:
        return sha256_text(canonical_json(self.doc))

    def scope_digest(self, stage: str) -> str:
        if stage not in STAGE_SCOPES:
            raise ConfigError(f"unknown stage: {stage}")
        scope = {path: self[path] for path in STAGE_SCOPES[stage]}
        return sha256_text(canonical_json(scope))

    def with_seed(self, seed: int) -> "PipelineConfig":
        doc = copy.deepcopy(self.doc)
        doc["seed"] = int(seed)
        return PipelineConfig(doc)


def load_config(path: str | Path | None = None) -> PipelineConfig:
    """Defaults overlaid with the YAML document at path, fully validated."""
    override: dict = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                loaded = yaml.safe_load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: invalid YAML: {exc}") from None
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigError(f"{path}: top level must be a mapping")
        override = loaded
    doc = _merge(DEFAULTS, override, "")
    doc["venues"] = _validate_venues(doc["venues"])
    _check_numbers(doc)
    return PipelineConfig(doc)
