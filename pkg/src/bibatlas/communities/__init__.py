"""Community detection, island merging, labels, and partition alignment."""

from .leiden import Partition, leiden, merge_islands, rb_quality
from .compare import ari, nmi, vi
from .labels import CommunityLabel, keyword_labels

__all__ = [
    "CommunityLabel",
    "Partition",
    "ari",
    "keyword_labels",
    "leiden",
    "merge_islands",
    "nmi",
    "rb_quality",
    "vi",
]
