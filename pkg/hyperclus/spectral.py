"""
Spectral clustering of EDVW hypergraphs.

hyperclus_g() bipartitions by the sign of the second eigenvector of L_sym. The two k-way
strategies repeat that bisection on induced sub-hypergraphs: one always splits the largest
cluster, the other tries every cluster and keeps the split with the lowest k-way NCut.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .config import SolverConfig
from .errors import (
    DisconnectedSpectrum,
    EmptyCluster,
    InputError,
    NotConverged,
    UnsplittableCluster,
)
from .hypergraph import EdvwHypergraph, build_hypergraph, raw_component_labels, restrict_edges
from .laplacian import SymLaplacian, sym_laplacian_from_walk
from .metrics import ncut_k
from .random_walk import RandomWalk, random_walk, require_connected

logger = logging.getLogger(__name__)

# Eigenvalues of L_sym below this count as zero
ZERO_EIGENVALUE_TOL = 1e-10
# Dense path: adding SHIFT * u u^T moves the null eigenvalue above the [0, 2] spectrum
DEFLATION_SHIFT = 3.0


# =============================================================================
# DOMAIN TYPES
# =============================================================================

@dataclass(frozen=True)
class EigenPair:
    value: float
    vector: np.ndarray
    residual: float


@dataclass(frozen=True)
class Partition:
    """Cluster id per vertex. lambda2 is set for 2-way spectral results."""

    labels: np.ndarray
    k: int
    lambda2: Optional[float] = None

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "labels", labels)
        if labels.size and (labels.min() < 0 or labels.max() >= self.k):
            raise InputError(f"Cluster ids must lie in [0, {self.k})")
        counts = np.bincount(labels, minlength=self.k)
        empty = np.flatnonzero(counts == 0)
        if len(empty):
            raise EmptyCluster(f"Partition has empty cluster(s): {empty.tolist()}")

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.labels == cluster)

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k)


Bisector = Callable[[EdvwHypergraph, Optional[SolverConfig]], Partition]


# =============================================================================
# EIGENSOLVER
# =============================================================================

def _orient(z: np.ndarray) -> np.ndarray:
    """Flip z so its first clearly nonzero entry is positive."""
    scale = np.max(np.abs(z))
    nonzero = np.flatnonzero(np.abs(z) > 1e-9 * scale)
    if len(nonzero) and z[nonzero[0]] < 0:
        return -z
    return z


def _start_vector(n: int, u: np.ndarray) -> np.ndarray:
    v0 = np.random.default_rng(0).uniform(-1.0, 1.0, n)
    v0 -= u * (u @ v0)
    return v0 / np.linalg.norm(v0)


def second_eigenpair(
    lsym: SymLaplacian,
    tol: float = 1e-10,
    max_iter: Optional[int] = None,
    accept: float = 1e-8,
    dense_max_vertices: int = 64,
) -> EigenPair:
    """
    Second smallest eigenpair of L_sym, with the null vector sqrt(phi) deflated.

    Uses a dense symmetric eigendecomposition up to `dense_max_vertices` vertices and
    ARPACK Lanczos above. The Lanczos run targets the largest eigenvalue of
    2I - L_sym - 2uu^T (u = sqrt(phi) normalized), which is 2 - lambda2.

    Raises:
        DisconnectedSpectrum: lambda2 is numerically zero
        NotConverged: Lanczos failed or the residual exceeds `accept`
    """
    n = lsym.n
    if n < 2:
        raise InputError(f"Need at least 2 vertices for a second eigenpair, got {n}")
    u = lsym.sqrt_phi / np.linalg.norm(lsym.sqrt_phi)

    if n <= dense_max_vertices:
        A = lsym.toarray()
        values, vectors = np.linalg.eigh(A + DEFLATION_SHIFT * np.outer(u, u))
        z = vectors[:, 0]
        method = "dense"
    else:
        max_iter = max_iter if max_iter is not None else 20 * n + 1000

        def shifted(x):
            x = np.asarray(x, dtype=np.float64).ravel()
            return 2.0 * x - lsym.matvec(x) - 2.0 * u * (u @ x)

        op = LinearOperator((n, n), matvec=shifted, rmatvec=shifted, dtype=np.float64)
        try:
            _, vectors = eigsh(op, k=1, which="LA", tol=tol, maxiter=max_iter, v0=_start_vector(n, u))
        except ArpackNoConvergence as e:
            raise NotConverged(f"Lanczos did not converge in {max_iter} iterations: {e}", iterations=max_iter)
        z = vectors[:, 0]
        method = "lanczos"

    z = z - u * (u @ z)
    z = _orient(z / np.linalg.norm(z))
    Az = lsym.matvec(z)
    value = float(z @ Az)
    residual = float(np.linalg.norm(Az - value * z))
    logger.debug("Second eigenpair (%s, n=%d): lambda2=%.12g residual=%.3e", method, n, value, residual)

    if value < ZERO_EIGENVALUE_TOL:
        raise DisconnectedSpectrum(f"Second eigenvalue {value:.3e} is numerically zero; the hypergraph is disconnected")
    if residual > accept:
        raise NotConverged(f"Eigen residual {residual:.3e} exceeds {accept:.1e}", residual=residual)
    return EigenPair(value=value, vector=z, residual=residual)


def eigen_gap(
    lsym: SymLaplacian,
    tol: float = 1e-10,
    max_iter: Optional[int] = None,
    dense_max_vertices: int = 64,
) -> Tuple[float, float]:
    """(lambda2, lambda3) of L_sym. A large lambda3 - lambda2 means a well-separated 2-way cut."""
    n = lsym.n
    if n < 3:
        raise InputError(f"Need at least 3 vertices for lambda3, got {n}")
    u = lsym.sqrt_phi / np.linalg.norm(lsym.sqrt_phi)

    if n <= dense_max_vertices:
        values = np.linalg.eigvalsh(lsym.toarray() + DEFLATION_SHIFT * np.outer(u, u))
        return float(values[0]), float(values[1])

    max_iter = max_iter if max_iter is not None else 20 * n + 1000

    def shifted(x):
        x = np.asarray(x, dtype=np.float64).ravel()
        return 2.0 * x - lsym.matvec(x) - 2.0 * u * (u @ x)

    op = LinearOperator((n, n), matvec=shifted, rmatvec=shifted, dtype=np.float64)
    try:
        top = eigsh(op, k=2, which="LA", tol=tol, maxiter=max_iter, v0=_start_vector(n, u), return_eigenvectors=False)
    except ArpackNoConvergence as e:
        raise NotConverged(f"Lanczos did not converge in {max_iter} iterations: {e}", iterations=max_iter)
    lambda2, lambda3 = sorted(2.0 - top)
    return float(lambda2), float(lambda3)


# =============================================================================
# HYPERCLUS-G
# =============================================================================

def spectral_embedding(walk: RandomWalk, solver: Optional[SolverConfig] = None) -> EigenPair:
    """Second eigenpair of the walk's normalized Laplacian."""
    solver = solver or SolverConfig()
    lsym = sym_laplacian_from_walk(walk.transition, walk.stationary)
    return second_eigenpair(
        lsym,
        tol=solver.eigen_tol,
        max_iter=solver.eigen_iterations(lsym.n),
        accept=solver.eigen_accept,
        dense_max_vertices=solver.dense_max_vertices,
    )


def sign_partition(z: np.ndarray, lambda2: Optional[float] = None) -> Partition:
    """Cluster 0 = {u : z(u) >= 0}, cluster 1 = the rest."""
    labels = np.where(z >= 0, 0, 1)
    if labels.min() == labels.max():
        raise UnsplittableCluster("Eigenvector has a single sign; no bipartition")
    return Partition(labels=labels, k=2, lambda2=lambda2)


def hyperclus_g(
    h: EdvwHypergraph,
    solver: Optional[SolverConfig] = None,
    walk: Optional[RandomWalk] = None,
) -> Partition:
    """
    Bipartition a connected hypergraph by the sign of its second L_sym eigenvector.

    Args:
        h: Connected EDVW hypergraph
        solver: Tolerances and iteration limits
        walk: Precomputed random_walk(h); built here when omitted

    Returns:
        Partition with k=2 and lambda2 set

    Raises:
        Disconnected, NotConverged, DegenerateStationary
    """
    walk = walk or random_walk(h, solver)
    pair = spectral_embedding(walk, solver)
    return sign_partition(pair.vector, pair.value)


# =============================================================================
# K-WAY STRATEGIES
# =============================================================================

def split_cluster(
    h: EdvwHypergraph,
    vertices: np.ndarray,
    solver: Optional[SolverConfig] = None,
    bisector: Bisector = hyperclus_g,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Bisect the sub-hypergraph induced on `vertices`.

    Hyperedges are restricted to the cluster with omega unchanged; restrictions with fewer
    than 2 members are dropped. If the result falls apart, the largest piece (lowest vertex
    on ties) is split off from the rest without an eigensolve.

    Returns:
        (kept, moved) original vertex ids; `kept` is the z >= 0 side

    Raises:
        UnsplittableCluster: fewer than 2 vertices or no hyperedge survives
    """
    vertices = np.asarray(vertices, dtype=np.int64)
    if len(vertices) < 2:
        raise UnsplittableCluster(f"Cluster of {len(vertices)} vertex cannot be split")
    raw = restrict_edges(h, vertices)
    if not raw:
        raise UnsplittableCluster(f"Cluster of {len(vertices)} vertices induces no hyperedge")

    pieces = raw_component_labels(raw, len(vertices))
    n_pieces = int(pieces.max()) + 1
    if n_pieces > 1:
        largest = int(np.argmax(np.bincount(pieces)))
        logger.info("Induced sub-hypergraph has %d components; splitting off the largest", n_pieces)
        return vertices[pieces == largest], vertices[pieces != largest]

    names = None if h.vertex_names is None else [h.vertex_names[v] for v in vertices]
    sub = build_hypergraph(raw, len(vertices), policy="prune", vertex_names=names)
    part = bisector(sub, solver)
    return vertices[part.labels == 0], vertices[part.labels == 1]


def _check_k(h: EdvwHypergraph, k: int) -> None:
    if k < 2:
        raise InputError(f"k must be >= 2, got {k}")
    if k > h.n_vertices:
        raise InputError(f"k={k} exceeds the number of vertices ({h.n_vertices})")


def kway_recursive_largest(
    h: EdvwHypergraph,
    k: int,
    solver: Optional[SolverConfig] = None,
    bisector: Bisector = hyperclus_g,
) -> Partition:
    """
    k clusters by k-1 bisections, each applied to the currently largest cluster.

    Ties in size go to the lowest cluster id. The split-off half gets the next free id.
    """
    _check_k(h, k)
    if k == 2:
        return bisector(h, solver)
    require_connected(h)

    labels = np.zeros(h.n_vertices, dtype=np.int64)
    for new_id in range(1, k):
        target = int(np.argmax(np.bincount(labels)))
        _, moved = split_cluster(h, np.flatnonzero(labels == target), solver, bisector)
        labels[moved] = new_id
        logger.debug("Split cluster %d: %d vertices moved to cluster %d", target, len(moved), new_id)
    return Partition(labels=labels, k=k)


def kway_best_split(
    h: EdvwHypergraph,
    k: int,
    solver: Optional[SolverConfig] = None,
    bisector: Bisector = hyperclus_g,
) -> Partition:
    """
    k clusters by greedy best bisection.

    With l clusters, every cluster is tentatively bisected and the bisection giving the
    lowest (l+1)-way NCut on the original hypergraph is committed. Ties go to the lowest
    cluster id. Clusters that cannot be split are skipped.
    """
    _check_k(h, k)
    if k == 2:
        return bisector(h, solver)
    walk = random_walk(h, solver)

    labels = np.zeros(h.n_vertices, dtype=np.int64)
    for new_id in range(1, k):
        best_value, best_cluster, best_labels = None, None, None
        for cluster in range(new_id):
            try:
                _, moved = split_cluster(h, np.flatnonzero(labels == cluster), solver, bisector)
            except UnsplittableCluster as e:
                logger.debug("Cluster %d skipped: %s", cluster, e)
                continue
            candidate = labels.copy()
            candidate[moved] = new_id
            value = ncut_k(walk.phi, walk.transition, candidate, new_id + 1)
            logger.debug("Stage %d: splitting cluster %d gives NCut %.6f", new_id, cluster, value)
            if best_value is None or value < best_value:
                best_value, best_cluster, best_labels = value, cluster, candidate
        if best_labels is None:
            raise UnsplittableCluster(f"No cluster can be split at stage {new_id} of {k - 1}")
        logger.debug("Stage %d: committed split of cluster %d (NCut %.6f)", new_id, best_cluster, best_value)
        labels = best_labels
    return Partition(labels=labels, k=k)


KWAY_FUNCTIONS = {
    "largest": kway_recursive_largest,
    "best": kway_best_split,
}


def cluster(
    h: EdvwHypergraph,
    k: int,
    strategy: str = "largest",
    solver: Optional[SolverConfig] = None,
    bisector: Bisector = hyperclus_g,
) -> Partition:
    """Dispatch to a k-way strategy by name."""
    if strategy not in KWAY_FUNCTIONS:
        raise InputError(f"Invalid strategy '{strategy}'. Must be one of: {', '.join(KWAY_FUNCTIONS)}")
    return KWAY_FUNCTIONS[strategy](h, k, solver, bisector)
