"""Embedding post-processing: whitening, centroids, hybrid concatenation."""

from .io import load_vectors, save_vectors_columnar, save_vectors_jsonl
from .whitening import WhiteningModel, apply_whitening, fit_whitening
from .hybrid import (
    BlockVectors,
    HybridVector,
    TrivialCentroidError,
    author_specter_centroid,
    cosine,
    hybrid_concat,
    DEFAULT_WEIGHTS,
)

__all__ = [
    "BlockVectors",
    "DEFAULT_WEIGHTS",
    "HybridVector",
    "TrivialCentroidError",
    "WhiteningModel",
    "apply_whitening",
    "author_specter_centroid",
    "cosine",
    "fit_whitening",
    "hybrid_concat",
    "load_vectors",
    "save_vectors_columnar",
    "save_vectors_jsonl",
]
