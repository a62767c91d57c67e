"""Temporally held-out collaborator prediction.

Splits the corpus at a cutoff year, rebuilds whitening, author centroids,
and the coauthor graph from the training side only, then scores
distance-gated nearest-centroid candidate partners against what actually
happened in the holdout window, with three null baselines and a
cosine-calibration gradient.
"""

from bibatlas.phantom.split import TemporalSplit, make_split
from bibatlas.phantom.evaluate import PhantomCandidate, phantom_partners, evaluate

__all__ = [
    "TemporalSplit",
    "make_split",
    "PhantomCandidate",
    "phantom_partners",
    "evaluate",
]
