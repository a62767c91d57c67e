"""Bibliometric graph-analytics engine.

Turns raw scholarly metadata into a deduplicated corpus, resolved author
identities, whitened hybrid embeddings, coauthor/semantic/multiplex graphs,
community partitions, temporal link-prediction reports, career trajectories,
and a chunked JSON bundle for a static browser atlas.
"""

__version__ = "0.1.0"
