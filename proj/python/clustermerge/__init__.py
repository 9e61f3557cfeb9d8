"""Precise protein sequence clustering by bottom-up cluster merging."""

from ._clustermerge import (  # noqa: F401
    InputError,
    Scoring,
    SequenceStore,
    align,
    brute_force_pairs,
    cluster,
    cluster_stats,
    extract_pairs,
    planted_families,
    recall,
)

__version__ = "0.1.0"
