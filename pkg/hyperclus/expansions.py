"""
Graph expansions of a hypergraph (CLIQUE++, STAR++) and pairwise-graph spectral bisection.

Both expansions ignore gamma. Baseline partitions are scored on the hypergraph's own
objective by the caller.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph
from scipy.sparse.linalg import LinearOperator

from .config import SolverConfig
from .errors import Disconnected, EmptyCluster, UnsplittableCluster
from .hypergraph import EdvwHypergraph, build_hypergraph
from .laplacian import SymLaplacian
from .random_walk import TransitionMatrix
from .spectral import Partition, second_eigenpair, sign_partition

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WeightedGraph:
    """
    Undirected weighted graph.

    origin_map[i] is the hypergraph vertex behind graph vertex i, or -1 for a STAR++
    edge-vertex. Original vertices always come first, in hypergraph order.
    """

    n_vertices: int
    adjacency: sp.csr_matrix
    origin_map: np.ndarray

    @property
    def n_edges(self) -> int:
        """Number of distinct vertex pairs with positive weight."""
        return int(sp.triu(self.adjacency, k=1).nnz)

    @property
    def n_original(self) -> int:
        return int(np.count_nonzero(self.origin_map >= 0))

    @property
    def degrees(self) -> np.ndarray:
        return np.asarray(self.adjacency.sum(axis=1)).ravel()


# =============================================================================
# EXPANSIONS
# =============================================================================

def clique_expansion(h: EdvwHypergraph) -> WeightedGraph:
    """Every pair inside a hyperedge gets omega(e); pairs shared by several hyperedges sum."""
    edge_idx, vertex_idx, _ = h.incidence_arrays()
    B = sp.csr_matrix((np.ones(len(edge_idx)), (vertex_idx, edge_idx)), shape=(h.n_vertices, h.n_edges))
    A = (B @ sp.diags(h.edge_weights) @ B.T).tolil()
    A.setdiag(0)
    A = A.tocsr()
    A.eliminate_zeros()
    A = ((A + A.T) * 0.5).tocsr()
    A.sort_indices()
    return WeightedGraph(n_vertices=h.n_vertices, adjacency=A, origin_map=np.arange(h.n_vertices))


def clique_pair_additions(h: EdvwHypergraph) -> int:
    """Sum over hyperedges of |e|(|e|-1)/2, the pair insertions before accumulation."""
    sizes = h.edge_sizes
    return int(np.sum(sizes * (sizes - 1) // 2))


def star_expansion(h: EdvwHypergraph) -> WeightedGraph:
    """One extra vertex n+e per hyperedge, joined to each member u with weight omega(e)/|e|."""
    edge_idx, vertex_idx, _ = h.incidence_arrays()
    n = h.n_vertices + h.n_edges
    weight = (h.edge_weights / h.edge_sizes)[edge_idx]
    hub = h.n_vertices + edge_idx
    rows = np.concatenate([vertex_idx, hub])
    cols = np.concatenate([hub, vertex_idx])
    A = sp.csr_matrix((np.concatenate([weight, weight]), (rows, cols)), shape=(n, n))
    A.sort_indices()
    origin = np.concatenate([np.arange(h.n_vertices), np.full(h.n_edges, -1)])
    return WeightedGraph(n_vertices=n, adjacency=A, origin_map=origin)


def pairwise_hypergraph(g: WeightedGraph) -> EdvwHypergraph:
    """A graph as a 2-uniform hypergraph: one hyperedge per edge, omega = weight, gamma = 1."""
    upper = sp.triu(g.adjacency, k=1).tocoo()
    raw = [(float(w), {int(u): 1.0, int(v): 1.0}) for u, v, w in zip(upper.row, upper.col, upper.data)]
    return build_hypergraph(raw, g.n_vertices, policy="strict")


# =============================================================================
# GRAPH SPECTRAL CLUSTERING
# =============================================================================

def _check_graph_connected(g: WeightedGraph) -> None:
    n_comp, labels = csgraph.connected_components(g.adjacency, directed=False)
    if n_comp > 1:
        sizes = sorted(np.bincount(labels).tolist(), reverse=True)
        raise Disconnected(f"Graph is disconnected: {n_comp} components of sizes {sizes}", sizes)


def graph_transition_matrix(g: WeightedGraph) -> TransitionMatrix:
    """D^-1 A; its stationary distribution is d / sum(d)."""
    P = (sp.diags(1.0 / g.degrees) @ g.adjacency).tocsr()
    P.sort_indices()
    op = LinearOperator(P.shape, matvec=lambda x: P @ x, rmatvec=lambda x: P.T @ x, dtype=np.float64)
    return TransitionMatrix(n=g.n_vertices, P=P, operator=op)


def graph_sym_laplacian(g: WeightedGraph) -> SymLaplacian:
    """I - D^-1/2 A D^-1/2 with null vector sqrt(d / sum(d))."""
    d = g.degrees
    inv = 1.0 / np.sqrt(d)
    coo = g.adjacency.tocoo()
    normalized = sp.csr_matrix((coo.data * (inv[coo.row] * inv[coo.col]), (coo.row, coo.col)), shape=coo.shape)
    L_sym = (sp.identity(g.n_vertices, format="csr") - normalized).tocsr()
    L_sym.sort_indices()
    op = LinearOperator(L_sym.shape, matvec=lambda x: L_sym @ x, rmatvec=lambda x: L_sym @ x, dtype=np.float64)
    return SymLaplacian(L_sym=L_sym, sqrt_phi=np.sqrt(d / d.sum()), operator=op)


def graph_spectral_2way(
    g: WeightedGraph,
    restrict_to_originals: bool = False,
    solver: Optional[SolverConfig] = None,
) -> Partition:
    """
    Sign split of the second eigenvector of L_RW = D^-1 (D - A).

    L_RW shares eigenvalues with the symmetric normalization; its eigenvectors are
    D^-1/2 times the symmetric ones, so signs are read off the symmetric eigenvector.
    With restrict_to_originals, the edge-vertices of a STAR++ graph are dropped.

    Raises:
        Disconnected, NotConverged, UnsplittableCluster
    """
    solver = solver or SolverConfig()
    _check_graph_connected(g)
    lsym = graph_sym_laplacian(g)
    pair = second_eigenpair(
        lsym,
        tol=solver.eigen_tol,
        max_iter=solver.eigen_iterations(g.n_vertices),
        accept=solver.eigen_accept,
        dense_max_vertices=solver.dense_max_vertices,
    )
    part = sign_partition(pair.vector, pair.value)
    if not restrict_to_originals:
        return part
    labels = part.labels[g.origin_map >= 0]
    try:
        return Partition(labels=labels, k=2, lambda2=pair.value)
    except EmptyCluster:
        raise UnsplittableCluster("STAR++ split puts every original vertex on one side")


def clique_bisector(h: EdvwHypergraph, solver: Optional[SolverConfig] = None) -> Partition:
    return graph_spectral_2way(clique_expansion(h), restrict_to_originals=False, solver=solver)


def star_bisector(h: EdvwHypergraph, solver: Optional[SolverConfig] = None) -> Partition:
    return graph_spectral_2way(star_expansion(h), restrict_to_originals=True, solver=solver)


# =============================================================================
# EXPORT
# =============================================================================

def write_edge_list(g: WeightedGraph, path: Union[str, Path]) -> None:
    """Whitespace edge list, one `u v weight` line per pair u < v."""
    upper = sp.triu(g.adjacency, k=1).tocoo()
    order = np.lexsort((upper.col, upper.row))
    with open(path, "w") as f:
        for i in order:
            f.write(f"{upper.row[i]} {upper.col[i]} {float(upper.data[i])!r}\n")
    logger.debug("Wrote %d edges to %s", len(order), path)
