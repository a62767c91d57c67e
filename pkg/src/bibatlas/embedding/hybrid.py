"""Citation-weighted author centroids and weighted block concatenation.

An author's document block is the L2-normalized, citation-weighted mean of
their whitened paper vectors (weight 1 + ln(1 + citations)). The hybrid
vector concatenates the document, concept, and venue blocks scaled by the
square roots of the mixing weights, so the hybrid cosine of two full-block
authors decomposes exactly into the weighted sum of per-block cosines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_WEIGHTS = (0.55, 0.30, 0.15)
CENTROID_NORM_FLOOR = 1e-12


class TrivialCentroidError(ValueError):
    """Raised when the weighted sum cancels to (numerically) zero."""


@dataclass
class BlockVectors:
    """Per-author blocks; a missing block is the zero vector."""

    owner: str
    specter: np.ndarray
    concept: np.ndarray
    venue: np.ndarray


@dataclass
class HybridVector:
    owner: str
    h: np.ndarray
    weights: tuple[float, float, float]


def author_specter_centroid(
    papers: list[tuple[np.ndarray, int]],
) -> np.ndarray:
    """Unit-normalized citation-weighted mean of whitened paper vectors.

    papers: (vector, citation count) pairs. Weights use the natural log.
    Raises TrivialCentroidError when the weighted sum cancels; callers flag
    the author and exclude them downstream.
    """
    if not papers:
        raise ValueError("centroid needs at least one paper")
    total = np.zeros_like(np.asarray(papers[0][0], dtype=np.float64))
    for vec, citations in papers:
        weight = 1.0 + math.log1p(max(0, int(citations)))
        total += weight * np.asarray(vec, dtype=np.float64)
    norm = float(np.linalg.norm(total))
    if norm <= CENTROID_NORM_FLOOR:
        raise TrivialCentroidError("weighted paper vectors cancel to zero")
    return total / norm


def _as_unit_or_zero(vec: np.ndarray, label: str) -> np.ndarray:
    v = np.asarray(vec, dtype=np.float64)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        return v
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"{label} block must be unit or zero (norm {norm})")
    return v


def hybrid_concat(
    blocks: BlockVectors,
    weights: tuple[float, float, float] = DEFAULT_WEIGHTS,
) -> HybridVector:
    """Concatenate [sqrt(w_s) s, sqrt(w_c) c, sqrt(w_v) v], then renormalize.

    With unit blocks and weights summing to 1 the concatenation already has
    unit norm; renormalization only matters when a block is missing.
    """
    w_s, w_c, w_v = weights
    if min(weights) <= 0:
        raise ValueError("weights must be positive")
    parts = [
        math.sqrt(w_s) * _as_unit_or_zero(blocks.specter, "specter"),
        math.sqrt(w_c) * _as_unit_or_zero(blocks.concept, "concept"),
        math.sqrt(w_v) * _as_unit_or_zero(blocks.venue, "venue"),
    ]
    h = np.concatenate(parts)
    norm = float(np.linalg.norm(h))
    if norm == 0.0:
        raise ValueError(f"author {blocks.owner}: all three blocks are zero")
    return HybridVector(owner=blocks.owner, h=h / norm, weights=(w_s, w_c, w_v))


def cosine(x: np.ndarray, y: np.ndarray) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    nx = float(np.linalg.norm(x))
    ny = float(np.linalg.norm(y))
    if nx == 0.0 or ny == 0.0:
        raise ValueError("cosine of a zero vector is undefined")
    return float(np.dot(x, y) / (nx * ny))
