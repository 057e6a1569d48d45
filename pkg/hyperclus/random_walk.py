"""
EDVW random walk: transition matrix, stationary distribution, boundary flux.

From vertex u the walk picks a hyperedge e containing u with probability omega(e)/d(u), then
a vertex v of e with probability gamma_e(v)/delta(e). In matrix form P = D_V^-1 W D_E^-1 R.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph
from scipy.sparse.linalg import LinearOperator, spsolve

from .config import STATIONARY_METHODS, SolverConfig
from .errors import Disconnected, InputError, LengthMismatch, NotConverged
from .hypergraph import EdvwHypergraph, IncidenceSystem, check_connected, component_sizes, incidence_matrices

logger = logging.getLogger(__name__)

VertexSet = Union[np.ndarray, Iterable[int]]


# =============================================================================
# DOMAIN TYPES
# =============================================================================

@dataclass(frozen=True)
class TransitionMatrix:
    """
    Row-stochastic transition matrix.

    `P` is the explicit CSR matrix. When the hypergraph is too dense to materialize it
    (sum of |e|^2 above the configured budget) `P` is None and the walk is applied through
    `operator`, a LinearOperator whose matvec is P @ x and rmatvec is P.T @ x.
    """

    n: int
    P: Optional[sp.csr_matrix]
    operator: LinearOperator

    @property
    def is_explicit(self) -> bool:
        return self.P is not None

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """P @ x."""
        if self.P is not None:
            return self.P @ x
        return self.operator.matvec(x)

    def rmatvec(self, x: np.ndarray) -> np.ndarray:
        """P.T @ x, i.e. the row vector x P."""
        if self.P is not None:
            return self.P.T @ x
        return self.operator.rmatvec(x)

    def row_sums(self) -> np.ndarray:
        return self.matvec(np.ones(self.n))

    def toarray(self) -> np.ndarray:
        if self.P is not None:
            return self.P.toarray()
        return self.operator.matmat(np.eye(self.n))


@dataclass(frozen=True)
class StationaryDistribution:
    phi: np.ndarray
    residual: float
    iterations: int


@dataclass(frozen=True)
class RandomWalk:
    """Everything the spectral pipeline needs from one hypergraph, computed once."""

    incidence: IncidenceSystem
    transition: TransitionMatrix
    stationary: StationaryDistribution

    @property
    def phi(self) -> np.ndarray:
        return self.stationary.phi


# =============================================================================
# TRANSITION MATRIX
# =============================================================================

def explicit_nnz_estimate(inc: IncidenceSystem) -> int:
    """Upper bound on nnz(P): sum over hyperedges of |e|^2."""
    sizes = np.diff(inc.R.indptr)
    return int(np.sum(sizes.astype(np.int64) ** 2))


def transition_operator(inc: IncidenceSystem) -> TransitionMatrix:
    """P applied as D_V^-1 W D_E^-1 R without forming the product."""
    R, W = inc.R, inc.W
    inv_dv = 1.0 / inc.d_V
    inv_de = 1.0 / inc.d_E
    RT, WT = R.T.tocsr(), W.T.tocsr()

    def matvec(x):
        x = np.asarray(x, dtype=np.float64).ravel()
        return inv_dv * (W @ (inv_de * (R @ x)))

    def rmatvec(x):
        x = np.asarray(x, dtype=np.float64).ravel()
        return RT @ (inv_de * (WT @ (inv_dv * x)))

    n = inc.n_vertices
    op = LinearOperator((n, n), matvec=matvec, rmatvec=rmatvec, dtype=np.float64)
    return TransitionMatrix(n=n, P=None, operator=op)


def transition_matrix(inc: IncidenceSystem) -> TransitionMatrix:
    """
    Explicit P = D_V^-1 W D_E^-1 R in CSR form.

    P[u, v] = sum over e containing u of (omega(e)/d(u)) * (gamma_e(v)/delta(e)).
    """
    left = sp.diags(1.0 / inc.d_V) @ inc.W
    right = sp.diags(1.0 / inc.d_E) @ inc.R
    P = (left @ right).tocsr()
    P.sum_duplicates()
    P.sort_indices()
    n = inc.n_vertices
    op = LinearOperator((n, n), matvec=lambda x: P @ x, rmatvec=lambda x: P.T @ x, dtype=np.float64)
    return TransitionMatrix(n=n, P=P, operator=op)


def build_transition(inc: IncidenceSystem, nnz_budget: int = 50_000_000) -> TransitionMatrix:
    """Explicit P when it fits the budget, operator form otherwise."""
    estimate = explicit_nnz_estimate(inc)
    if estimate > nnz_budget:
        logger.info("P would hold up to %d nonzeros (budget %d); using the operator form", estimate, nnz_budget)
        return transition_operator(inc)
    return transition_matrix(inc)


# =============================================================================
# STATIONARY DISTRIBUTION
# =============================================================================

def _check_irreducible(P: TransitionMatrix) -> None:
    if not P.is_explicit:
        return
    n_comp, labels = csgraph.connected_components(P.P, directed=True, connection="strong")
    if n_comp > 1:
        sizes = sorted(np.bincount(labels).tolist(), reverse=True)
        raise Disconnected(f"Transition matrix is reducible: {n_comp} components", sizes)


def _solve_left_null(M: sp.spmatrix) -> np.ndarray:
    """Solve x M = x with sum(x) = 1 for an irreducible row-stochastic M."""
    size = M.shape[0]
    if size == 1:
        return np.ones(1)
    system = (M.T - sp.identity(size, format="csr")).tocsr()[:-1]
    system = sp.vstack([system, sp.csr_matrix(np.ones((1, size)))]).tocsc()
    rhs = np.zeros(size)
    rhs[-1] = 1.0
    return np.atleast_1d(spsolve(system, rhs))


def edge_chain_stationary(inc: IncidenceSystem) -> np.ndarray:
    """
    phi from the stationary vector of the hyperedge chain.

    P factors as A B with A = D_V^-1 W (vertex to hyperedge) and B = D_E^-1 R (hyperedge to
    vertex). If psi is stationary for the |E| x |E| chain Q = B A then psi B is stationary
    for P, so only a system the size of the edge set is solved.
    """
    A = sp.diags(1.0 / inc.d_V) @ inc.W
    B = (sp.diags(1.0 / inc.d_E) @ inc.R).tocsr()
    psi = _solve_left_null((B @ A).tocsr())
    return B.T @ psi


def _initial_vector(
    P: TransitionMatrix, method: str, incidence: Optional[IncidenceSystem]
) -> Tuple[np.ndarray, str]:
    n = P.n
    uniform = np.full(n, 1.0 / n)
    if method == "power":
        return uniform, "uniform start"
    if incidence is not None:
        phi, source = edge_chain_stationary(incidence), "hyperedge chain solve"
    elif P.is_explicit:
        phi, source = _solve_left_null(P.P), "direct solve"
    else:
        return uniform, "uniform start (operator without incidence)"

    phi = np.maximum(np.asarray(phi, dtype=np.float64), 0.0)
    total = phi.sum()
    if not np.isfinite(total) or total <= 0:
        logger.warning("Direct stationary solve gave an unusable vector; falling back to power iteration")
        return uniform, "uniform start (direct solve failed)"
    return phi / total, source


def stationary_distribution(
    P: TransitionMatrix,
    tol: float = 1e-10,
    max_iter: Optional[int] = None,
    method: str = "direct",
    incidence: Optional[IncidenceSystem] = None,
) -> StationaryDistribution:
    """
    Stationary distribution of P with ||phi P - phi||_1 <= tol.

    With method "direct" phi is first solved for exactly: through the hyperedge chain when
    the incidence system is given, otherwise from (P^T - I) phi = 0 with a normalization
    row when P is explicit. Power iteration on the lazy walk (P + I)/2 then certifies the
    residual and polishes if needed. The lazy walk has the same stationary distribution as
    P and is aperiodic. With method "power", or an operator without incidence, iteration
    starts from the uniform vector.

    Raises:
        Disconnected: P is reducible
        NotConverged: max_iter iterations without reaching tol
    """
    if tol <= 0:
        raise InputError(f"tol must be > 0, got {tol}")
    if method not in STATIONARY_METHODS:
        raise InputError(f"Unknown stationary method '{method}'. Must be one of: {', '.join(STATIONARY_METHODS)}")
    _check_irreducible(P)
    if max_iter is None:
        max_iter = 100 * P.n + 1000

    phi, source = _initial_vector(P, method, incidence)
    residual = np.inf
    for iteration in range(1, max_iter + 1):
        phi_p = P.rmatvec(phi)
        residual = float(np.abs(phi_p - phi).sum())
        if residual <= tol:
            logger.debug("Stationary distribution from %s certified after %d iterations (residual %.3e)",
                         source, iteration, residual)
            return StationaryDistribution(phi=phi, residual=residual, iterations=iteration)
        phi = 0.5 * (phi + phi_p)
        phi /= phi.sum()

    raise NotConverged(
        f"Power iteration from {source} did not reach tol {tol:.1e} in {max_iter} iterations "
        f"(residual {residual:.3e})",
        residual=residual,
        iterations=max_iter,
    )


def require_connected(h: EdvwHypergraph) -> None:
    """Raise Disconnected with the component sizes unless h is connected."""
    if not check_connected(h):
        sizes = component_sizes(h)
        raise Disconnected(f"Hypergraph is disconnected: {len(sizes)} components of sizes {sizes}", sizes)


def random_walk(h: EdvwHypergraph, solver: Optional[SolverConfig] = None) -> RandomWalk:
    """Incidence matrices, P and phi of a connected hypergraph."""
    solver = solver or SolverConfig()
    require_connected(h)
    inc = incidence_matrices(h)
    P = build_transition(inc, solver.explicit_nnz_budget)
    phi = stationary_distribution(
        P,
        solver.stationary_tol,
        solver.stationary_iterations(h.n_vertices),
        method=solver.stationary_method,
        incidence=inc,
    )
    return RandomWalk(incidence=inc, transition=P, stationary=phi)


# =============================================================================
# FLUX
# =============================================================================

def as_mask(S: VertexSet, n: int) -> np.ndarray:
    """Boolean membership mask of length n for a vertex set given as indices or a mask."""
    arr = np.asarray(S if not isinstance(S, (set, frozenset)) else sorted(S))
    if arr.dtype == bool:
        if arr.shape != (n,):
            raise LengthMismatch(f"Mask has length {arr.shape[0] if arr.ndim else 0}, expected {n}")
        return arr
    mask = np.zeros(n, dtype=bool)
    if arr.size:
        idx = arr.astype(np.int64).ravel()
        if idx.min() < 0 or idx.max() >= n:
            raise InputError(f"Vertex set has indices outside [0, {n})")
        mask[idx] = True
    return mask


def boundary_flux(phi: Union[StationaryDistribution, np.ndarray], P: TransitionMatrix, S: VertexSet) -> Tuple[float, float]:
    """
    Stationary probability flux across the boundary of S.

    Returns:
        (out_flux, in_flux) where out_flux = sum over u in S, v not in S of phi(u) P[u, v]
        and in_flux is the same sum with S and its complement exchanged
    """
    phi = phi.phi if isinstance(phi, StationaryDistribution) else np.asarray(phi, dtype=np.float64)
    if len(phi) != P.n:
        raise LengthMismatch(f"phi has length {len(phi)}, P has {P.n} vertices")
    mask = as_mask(S, P.n)
    inside = mask.astype(np.float64)
    outside = 1.0 - inside
    out_flux = float(np.dot(phi * inside, P.matvec(outside)))
    in_flux = float(np.dot(phi * outside, P.matvec(inside)))
    return out_flux, in_flux
