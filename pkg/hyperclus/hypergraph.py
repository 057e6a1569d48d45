"""
EDVW hypergraph data model.

A hypergraph here is a vertex count plus a tuple of hyperedges. Each hyperedge has a
positive weight omega(e) and a map vertex -> gamma_e(v) > 0 over its members; vertices not
in the map have gamma_e(v) = 0. Vertices are dense 0-based integers.

Everything is immutable after build_hypergraph() returns.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .errors import (
    InputError,
    IsolatedVertex,
    NonPositiveWeight,
    SingletonEdge,
    VertexIndexOutOfRange,
)

logger = logging.getLogger(__name__)

# Raw member weights: either a mapping or a sequence of (vertex, gamma) pairs.
# Pairs may repeat a vertex; repeated entries are summed.
RawMembers = Union[Mapping[int, float], Sequence[Tuple[int, float]]]
RawEdge = Tuple[float, RawMembers]


# =============================================================================
# DOMAIN TYPES
# =============================================================================

@dataclass(frozen=True)
class Hyperedge:
    """One hyperedge: weight omega(e) and member weights gamma_e(v), keyed by vertex."""

    weight: float
    members: Dict[int, float]

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def degree(self) -> float:
        """delta(e), the sum of member weights."""
        return math.fsum(self.members.values())


@dataclass(frozen=True, eq=True)
class EdvwHypergraph:
    n_vertices: int
    hyperedges: Tuple[Hyperedge, ...]
    vertex_names: Optional[Tuple[str, ...]] = None

    @property
    def n_edges(self) -> int:
        return len(self.hyperedges)

    @cached_property
    def n_connections(self) -> int:
        """m = sum of |e| over all hyperedges."""
        return sum(e.size for e in self.hyperedges)

    @cached_property
    def edge_sizes(self) -> np.ndarray:
        return np.array([e.size for e in self.hyperedges], dtype=np.int64)

    @cached_property
    def edge_weights(self) -> np.ndarray:
        return np.array([e.weight for e in self.hyperedges], dtype=np.float64)

    def incidence_arrays(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Flat (edge index, vertex index, gamma) arrays, one entry per connection."""
        edge_idx = np.repeat(np.arange(self.n_edges, dtype=np.int64), self.edge_sizes)
        vertex_idx = np.fromiter(
            (v for e in self.hyperedges for v in e.members), dtype=np.int64, count=self.n_connections
        )
        gamma = np.fromiter(
            (g for e in self.hyperedges for g in e.members.values()), dtype=np.float64, count=self.n_connections
        )
        return edge_idx, vertex_idx, gamma

    def vertex_name(self, v: int) -> str:
        if self.vertex_names is not None:
            return self.vertex_names[v]
        return str(v)

    # Compared by value; not hashable.
    __hash__ = None


@dataclass(frozen=True)
class IncidenceSystem:
    """R (|E| x |V|, gamma), W (|V| x |E|, omega), d_V and d_E of a hypergraph."""

    R: sp.csr_matrix
    W: sp.csr_matrix
    d_V: np.ndarray
    d_E: np.ndarray

    @property
    def n_vertices(self) -> int:
        return self.R.shape[1]

    @property
    def n_edges(self) -> int:
        return self.R.shape[0]

    @property
    def m(self) -> int:
        return self.R.nnz


# =============================================================================
# HELPER FUNCTIONS
# =============================================================================

def _positive(value: float) -> bool:
    return isinstance(value, (int, float, np.floating, np.integer)) and math.isfinite(value) and value > 0


def _merge_members(raw: RawMembers, edge_no: int, n_vertices: int) -> Dict[int, float]:
    """Validate and merge raw member weights; duplicates are summed, result sorted by vertex."""
    items = raw.items() if isinstance(raw, Mapping) else raw
    merged: Dict[int, float] = {}
    for v, g in items:
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
            raise VertexIndexOutOfRange(f"Hyperedge {edge_no}: vertex index {v!r} is not an integer")
        v = int(v)
        if v < 0 or v >= n_vertices:
            raise VertexIndexOutOfRange(
                f"Hyperedge {edge_no}: vertex {v} out of range [0, {n_vertices})"
            )
        if not _positive(g):
            raise NonPositiveWeight(f"Hyperedge {edge_no}: gamma for vertex {v} must be > 0, got {g!r}")
        merged[v] = merged.get(v, 0.0) + float(g)
    return {v: merged[v] for v in sorted(merged)}


def _bipartite_adjacency(edge_idx: np.ndarray, vertex_idx: np.ndarray, n: int, k: int) -> sp.csr_matrix:
    """Adjacency of the vertex-hyperedge incidence graph; vertices first, then edges."""
    B = sp.coo_matrix((np.ones(len(edge_idx)), (vertex_idx, edge_idx)), shape=(n, k))
    return sp.bmat([[sp.csr_matrix((n, n)), B], [B.T, sp.csr_matrix((k, k))]], format="csr")


def _hypergraph_adjacency(h: EdvwHypergraph) -> sp.csr_matrix:
    edge_idx, vertex_idx, _ = h.incidence_arrays()
    return _bipartite_adjacency(edge_idx, vertex_idx, h.n_vertices, h.n_edges)


# =============================================================================
# CONSTRUCTION
# =============================================================================

def build_hypergraph(
    raw_edges: Iterable[RawEdge],
    n_vertices: int,
    policy: str = "prune",
    vertex_names: Optional[Sequence[str]] = None,
) -> EdvwHypergraph:
    """
    Build and validate an EDVW hypergraph.

    Args:
        raw_edges: (omega, members) pairs; members maps vertex -> gamma or lists (vertex, gamma) pairs
        n_vertices: Number of vertices, indices 0..n_vertices-1
        policy: "prune" drops hyperedges with fewer than 2 members, "strict" rejects them
        vertex_names: Optional external names, one per vertex

    Returns:
        EdvwHypergraph

    Raises:
        NonPositiveWeight, VertexIndexOutOfRange, SingletonEdge (strict), IsolatedVertex
    """
    if policy not in ("prune", "strict"):
        raise InputError(f"Invalid policy '{policy}'. Must be one of: prune, strict")

    edges: List[Hyperedge] = []
    pruned = 0
    for edge_no, (weight, raw_members) in enumerate(raw_edges):
        if not _positive(weight):
            raise NonPositiveWeight(f"Hyperedge {edge_no}: weight must be > 0, got {weight!r}")
        members = _merge_members(raw_members, edge_no, max(n_vertices, 0))
        if len(members) < 2:
            if policy == "strict":
                raise SingletonEdge(f"Hyperedge {edge_no} has {len(members)} member(s); at least 2 required")
            pruned += 1
            continue
        edges.append(Hyperedge(weight=float(weight), members=members))

    if pruned:
        logger.debug("Pruned %d hyperedge(s) with fewer than 2 members", pruned)

    if n_vertices < 2:
        raise InputError(f"A hypergraph needs at least 2 vertices, got {n_vertices}")

    degree_count = np.zeros(n_vertices, dtype=np.int64)
    for e in edges:
        degree_count[list(e.members)] += 1
    isolated = np.flatnonzero(degree_count == 0)
    if len(isolated):
        shown = ", ".join(str(v) for v in isolated[:10])
        more = f" (+{len(isolated) - 10} more)" if len(isolated) > 10 else ""
        raise IsolatedVertex(f"{len(isolated)} vertex/vertices belong to no hyperedge: {shown}{more}")

    if vertex_names is not None:
        vertex_names = tuple(str(name) for name in vertex_names)
        if len(vertex_names) != n_vertices:
            raise InputError(f"Got {len(vertex_names)} vertex names for {n_vertices} vertices")

    return EdvwHypergraph(n_vertices=int(n_vertices), hyperedges=tuple(edges), vertex_names=vertex_names)


def raw_edges_of(h: EdvwHypergraph) -> List[RawEdge]:
    """The hypergraph as raw (omega, members) pairs, suitable for build_hypergraph."""
    return [(e.weight, dict(e.members)) for e in h.hyperedges]


def with_unit_edvw(h: EdvwHypergraph) -> EdvwHypergraph:
    """Same hyperedges and weights with every gamma set to 1 (the EIVW ablation input)."""
    edges = tuple(Hyperedge(weight=e.weight, members={v: 1.0 for v in e.members}) for e in h.hyperedges)
    return EdvwHypergraph(n_vertices=h.n_vertices, hyperedges=edges, vertex_names=h.vertex_names)


def restrict_edges(h: EdvwHypergraph, vertices: Sequence[int]) -> List[RawEdge]:
    """
    Restrict every hyperedge to `vertices`, relabelled to local indices 0..len(vertices)-1.

    Weights omega(e) are unchanged and gamma values are kept for surviving members.
    Restricted edges with fewer than 2 members are dropped.
    """
    local = {int(v): i for i, v in enumerate(vertices)}
    restricted = []
    for e in h.hyperedges:
        members = {local[v]: g for v, g in e.members.items() if v in local}
        if len(members) >= 2:
            restricted.append((e.weight, members))
    return restricted


def induced_subhypergraph(h: EdvwHypergraph, vertices: Sequence[int]) -> EdvwHypergraph:
    """
    Sub-hypergraph induced on `vertices` (see restrict_edges).

    Raises:
        IsolatedVertex: when some vertex keeps no hyperedge after restriction
    """
    names = None
    if h.vertex_names is not None:
        names = [h.vertex_names[int(v)] for v in vertices]
    return build_hypergraph(restrict_edges(h, vertices), len(vertices), policy="prune", vertex_names=names)


# =============================================================================
# CONNECTIVITY
# =============================================================================

def check_connected(h: EdvwHypergraph) -> bool:
    """
    True iff every pair of vertices is joined by a hyperpath.

    Breadth-first search over the bipartite vertex-hyperedge incidence graph, started at
    vertex 0.
    """
    if h.n_vertices <= 1:
        return True
    order = csgraph.breadth_first_order(_hypergraph_adjacency(h), 0, directed=False, return_predecessors=False)
    reached = np.count_nonzero(order < h.n_vertices)
    return reached == h.n_vertices


def _first_appearance_order(labels: np.ndarray) -> np.ndarray:
    """Renumber component ids so they follow first appearance among vertices."""
    uniques, first = np.unique(labels, return_index=True)
    remap = np.empty(len(uniques), dtype=np.int64)
    remap[np.argsort(first)] = np.arange(len(uniques))
    return remap[np.searchsorted(uniques, labels)]


def component_labels(h: EdvwHypergraph) -> np.ndarray:
    """Connected-component id per vertex, numbered by lowest member vertex."""
    _, labels = csgraph.connected_components(_hypergraph_adjacency(h), directed=False)
    return _first_appearance_order(labels[: h.n_vertices])


def raw_component_labels(raw_edges: Sequence[RawEdge], n_vertices: int) -> np.ndarray:
    """
    component_labels for unvalidated raw edges; a vertex in no edge is its own component.
    """
    edge_idx, vertex_idx = [], []
    for e, (_, members) in enumerate(raw_edges):
        keys = members.keys() if isinstance(members, Mapping) else [v for v, _ in members]
        for v in keys:
            edge_idx.append(e)
            vertex_idx.append(int(v))
    adjacency = _bipartite_adjacency(
        np.asarray(edge_idx, dtype=np.int64), np.asarray(vertex_idx, dtype=np.int64), n_vertices, len(raw_edges)
    )
    _, labels = csgraph.connected_components(adjacency, directed=False)
    return _first_appearance_order(labels[:n_vertices])


def component_sizes(h: EdvwHypergraph) -> List[int]:
    """Vertex count of each connected component, largest first."""
    counts = np.bincount(component_labels(h))
    return sorted((int(c) for c in counts), reverse=True)


# =============================================================================
# INCIDENCE MATRICES
# =============================================================================

def incidence_matrices(h: EdvwHypergraph) -> IncidenceSystem:
    """
    Build R, W, d_V and d_E.

    R(e, v) = gamma_e(v); W(v, e) = omega(e) when v is in e; d_V(v) = sum of omega(e) over
    edges containing v; d_E(e) = sum of gamma_e(v) over members of e.
    """
    edge_idx, vertex_idx, gamma = h.incidence_arrays()
    n, k = h.n_vertices, h.n_edges
    omega = h.edge_weights[edge_idx]

    R = sp.csr_matrix((gamma, (edge_idx, vertex_idx)), shape=(k, n))
    W = sp.csr_matrix((omega, (vertex_idx, edge_idx)), shape=(n, k))
    # bincount sums in input order, so repeated runs agree bit for bit
    d_V = np.bincount(vertex_idx, weights=omega, minlength=n)
    d_E = np.bincount(edge_idx, weights=gamma, minlength=k)
    return IncidenceSystem(R=R, W=W, d_V=d_V, d_E=d_E)
