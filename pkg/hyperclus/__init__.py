"""
hyperclus - spectral clustering of hypergraphs with edge-dependent vertex weights.
"""

__version__ = "1.0.0"

from .config import PipelineConfig, SolverConfig, load_config
from .errors import Disconnected, HyperclusError, InputError, NotConverged
from .hypergraph import EdvwHypergraph, Hyperedge, build_hypergraph
from .metrics import greedy_f1_match, hungarian_f1_match, ncut2, ncut_k
from .random_walk import random_walk
from .spectral import Partition, cluster, hyperclus_g

__all__ = [
    "PipelineConfig",
    "SolverConfig",
    "load_config",
    "HyperclusError",
    "InputError",
    "Disconnected",
    "NotConverged",
    "EdvwHypergraph",
    "Hyperedge",
    "build_hypergraph",
    "random_walk",
    "Partition",
    "cluster",
    "hyperclus_g",
    "ncut2",
    "ncut_k",
    "greedy_f1_match",
    "hungarian_f1_match",
]
