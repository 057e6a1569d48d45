"""
Cluster quality measures on the hypergraph random walk, plus F1 matching against labels.

All cut measures take the stationary distribution phi and the transition matrix P of the
hypergraph being scored. For k-way results this is always the original hypergraph.
"""

import logging
from dataclasses import dataclass
from typing import Hashable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import EmptyCluster, LengthMismatch, TrivialPartition
from .random_walk import StationaryDistribution, TransitionMatrix, VertexSet, as_mask

logger = logging.getLogger(__name__)

PhiLike = Union[StationaryDistribution, np.ndarray]


def _phi(phi: PhiLike) -> np.ndarray:
    return phi.phi if isinstance(phi, StationaryDistribution) else np.asarray(phi, dtype=np.float64)


def _labels(labels) -> np.ndarray:
    # Partition objects carry .labels; plain arrays pass through
    return np.asarray(getattr(labels, "labels", labels))


# =============================================================================
# DOMAIN TYPES
# =============================================================================

@dataclass(frozen=True)
class ClusterQuality:
    ncut: float
    conductance: float
    boundary_volume: float
    vol_S: float
    vol_S_complement: float


@dataclass(frozen=True)
class F1Report:
    """
    Result of matching clusters to classes.

    per_cluster_f1 holds (cluster, class, f1) triples ordered by class. Unmatched classes
    appear with cluster None and f1 0.0.
    """

    per_cluster_f1: List[Tuple[Optional[int], Hashable, float]]
    weighted_f1: float

    @property
    def f1s(self) -> List[float]:
        return [f1 for _, _, f1 in self.per_cluster_f1]


# =============================================================================
# VOLUMES AND CUTS
# =============================================================================

def set_volume(phi: PhiLike, S: VertexSet) -> float:
    """vol(S): stationary mass of S."""
    phi = _phi(phi)
    return float(np.sum(phi[as_mask(S, len(phi))]))


def boundary_volume(phi: PhiLike, P: TransitionMatrix, S: VertexSet) -> float:
    """|dS| = sum over u in S, v outside S of phi(u) P[u, v]."""
    phi = _phi(phi)
    if len(phi) != P.n:
        raise LengthMismatch(f"phi has length {len(phi)}, P has {P.n} vertices")
    inside = as_mask(S, P.n).astype(np.float64)
    return float(np.dot(phi * inside, P.matvec(1.0 - inside)))


def _bipartition(phi: np.ndarray, P: TransitionMatrix, S: VertexSet) -> Tuple[float, float, float]:
    """(symmetric cut, vol S, vol S complement) for a nontrivial S."""
    if len(phi) != P.n:
        raise LengthMismatch(f"phi has length {len(phi)}, P has {P.n} vertices")
    mask = as_mask(S, P.n)
    size = int(mask.sum())
    if size == 0 or size == P.n:
        raise TrivialPartition(f"S has {size} of {P.n} vertices; need 0 < |S| < |V|")
    inside = mask.astype(np.float64)
    outside = 1.0 - inside
    out_flux = float(np.dot(phi * inside, P.matvec(outside)))
    in_flux = float(np.dot(phi * outside, P.matvec(inside)))
    # out and in agree up to the stationarity residual; averaging makes S and its complement score identically
    cut = (out_flux + in_flux) / 2
    return cut, float(np.sum(phi[mask])), float(np.sum(phi[~mask]))


def ncut2(phi: PhiLike, P: TransitionMatrix, S: VertexSet) -> float:
    """(1/vol(S) + 1/vol(S complement)) * |dS|."""
    cut, vol_s, vol_c = _bipartition(_phi(phi), P, S)
    return (1.0 / vol_s + 1.0 / vol_c) * cut


def conductance(phi: PhiLike, P: TransitionMatrix, S: VertexSet) -> float:
    """|dS| / min(vol(S), vol(S complement))."""
    cut, vol_s, vol_c = _bipartition(_phi(phi), P, S)
    return cut / min(vol_s, vol_c)


def quality(phi: PhiLike, P: TransitionMatrix, S: VertexSet) -> ClusterQuality:
    cut, vol_s, vol_c = _bipartition(_phi(phi), P, S)
    return ClusterQuality(
        ncut=(1.0 / vol_s + 1.0 / vol_c) * cut,
        conductance=cut / min(vol_s, vol_c),
        boundary_volume=cut,
        vol_S=vol_s,
        vol_S_complement=vol_c,
    )


def ncut_k(phi: PhiLike, P: TransitionMatrix, labels, k: Optional[int] = None) -> float:
    """
    k-way normalized cut: sum over clusters of |dS_i| / vol(S_i).

    Args:
        labels: cluster id per vertex (or a Partition)
        k: number of clusters; defaults to max label + 1

    Raises:
        EmptyCluster: some id in [0, k) labels no vertex
    """
    phi = _phi(phi)
    labels = _labels(labels).astype(np.int64)
    if len(labels) != P.n or len(phi) != P.n:
        raise LengthMismatch(f"labels has length {len(labels)}, phi {len(phi)}, P has {P.n} vertices")
    if k is None:
        k = int(labels.max()) + 1
    counts = np.bincount(labels, minlength=k)
    empty = np.flatnonzero(counts[:k] == 0)
    if len(empty) or len(counts) > k:
        raise EmptyCluster(f"Cluster ids must cover 0..{k - 1} with no empty cluster (empty: {empty.tolist()})")

    total = 0.0
    for i in range(k):
        inside = (labels == i).astype(np.float64)
        vol = float(np.sum(phi * inside))
        cut = float(np.dot(phi * inside, P.matvec(1.0 - inside)))
        total += cut / vol
    return total


# =============================================================================
# BATCH EVALUATION (dense, small n)
# =============================================================================

def batch_cut_volumes(phi: np.ndarray, P_dense: np.ndarray, masks: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Symmetric cut and both volumes for many bipartitions at once.

    Args:
        phi: stationary distribution
        P_dense: dense transition matrix
        masks: (batch, n) boolean membership rows

    Returns:
        (cut, vol_S, vol_S_complement), each of length batch
    """
    inside = masks.astype(np.float64)
    outside = 1.0 - inside
    flow = phi[:, None] * P_dense
    out_flux = np.einsum("bi,ij,bj->b", inside, flow, outside)
    in_flux = np.einsum("bi,ij,bj->b", outside, flow, inside)
    return (out_flux + in_flux) / 2, inside @ phi, outside @ phi


# =============================================================================
# SPECTRAL HELPERS
# =============================================================================

def indicator_vector(phi: PhiLike, S: VertexSet) -> np.ndarray:
    """
    x(u) = sqrt(vol(Sc)/vol(S)) on S and -sqrt(vol(S)/vol(Sc)) elsewhere.

    For this vector ncut2(S) equals half the Rayleigh quotient.
    """
    phi = _phi(phi)
    mask = as_mask(S, len(phi))
    size = int(mask.sum())
    if size == 0 or size == len(phi):
        raise TrivialPartition(f"S has {size} of {len(phi)} vertices; need 0 < |S| < |V|")
    vol_s = float(np.sum(phi[mask]))
    vol_c = float(np.sum(phi[~mask]))
    return np.where(mask, np.sqrt(vol_c / vol_s), -np.sqrt(vol_s / vol_c))


def relative_error(lambda2: float, ncut: float) -> float:
    """|lambda2 - ncut| / ncut."""
    return abs(lambda2 - ncut) / ncut


# =============================================================================
# F1 MATCHING
# =============================================================================

def _f1(cluster: np.ndarray, klass: np.ndarray) -> float:
    tp = int(np.count_nonzero(cluster & klass))
    if tp == 0:
        return 0.0
    precision = tp / int(np.count_nonzero(cluster))
    recall = tp / int(np.count_nonzero(klass))
    return 2 * precision * recall / (precision + recall)


def f1_matrix(pred, truth: Sequence[Hashable]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    F1 score of every (cluster, class) pair.

    Returns:
        (F, cluster_ids, class_ids) with F[i, j] the F1 of cluster_ids[i] against class_ids[j]
    """
    pred = _labels(pred)
    truth = np.asarray(truth)
    if len(pred) != len(truth):
        raise LengthMismatch(f"Prediction has {len(pred)} labels, truth has {len(truth)}")
    clusters = np.unique(pred)
    classes = np.unique(truth)
    F = np.zeros((len(clusters), len(classes)))
    for i, c in enumerate(clusters):
        in_cluster = pred == c
        for j, t in enumerate(classes):
            F[i, j] = _f1(in_cluster, truth == t)
    return F, clusters, classes


def greedy_match(F: np.ndarray) -> List[Tuple[int, int]]:
    """
    Repeatedly commit the largest entry whose row and column are both unmatched.

    Ties go to the lowest (row, column). Returns (row, column) pairs in commit order.
    """
    rows, cols = np.indices(F.shape)
    # lexsort keys run last-to-first: value descending, then row, then column
    order = np.lexsort((cols.ravel(), rows.ravel(), -F.ravel()))
    used_rows, used_cols = set(), set()
    pairs = []
    for flat in order:
        r, c = int(rows.flat[flat]), int(cols.flat[flat])
        if r in used_rows or c in used_cols:
            continue
        pairs.append((r, c))
        used_rows.add(r)
        used_cols.add(c)
        if len(pairs) == min(F.shape):
            break
    return pairs


def _report(F: np.ndarray, clusters, classes, truth: np.ndarray, pairs) -> F1Report:
    by_class = {c: (r, F[r, c]) for r, c in pairs}
    class_sizes = np.array([np.count_nonzero(truth == t) for t in classes], dtype=np.float64)
    per_class = []
    weighted = 0.0
    for j, t in enumerate(classes):
        if j in by_class:
            r, f1 = by_class[j]
            per_class.append((int(clusters[r]), t.item() if hasattr(t, "item") else t, float(f1)))
            weighted += class_sizes[j] / class_sizes.sum() * f1
        else:
            per_class.append((None, t.item() if hasattr(t, "item") else t, 0.0))
    return F1Report(per_cluster_f1=per_class, weighted_f1=float(weighted))


def greedy_f1_match(pred, truth: Sequence[Hashable]) -> F1Report:
    """Greedy one-to-one cluster/class matching; weighted F1 uses class sizes."""
    truth = np.asarray(truth)
    F, clusters, classes = f1_matrix(pred, truth)
    if len(clusters) != len(classes):
        logger.debug("Matching %d clusters against %d classes; unmatched ones score 0", len(clusters), len(classes))
    return _report(F, clusters, classes, truth, greedy_match(F))


def hungarian_f1_match(pred, truth: Sequence[Hashable]) -> F1Report:
    """Optimal one-to-one matching maximizing the total F1."""
    truth = np.asarray(truth)
    F, clusters, classes = f1_matrix(pred, truth)
    rows, cols = linear_sum_assignment(F, maximize=True)
    return _report(F, clusters, classes, truth, list(zip(rows.tolist(), cols.tolist())))
