"""
Random-walk hypergraph Laplacian L = Pi - (Pi P + P^T Pi)/2, its symmetric normalization
L_sym = Pi^-1/2 L Pi^-1/2, and the hypergraph Rayleigh quotient.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator

from .errors import DegenerateStationary, InputError, LengthMismatch, ZeroVector
from .random_walk import StationaryDistribution, TransitionMatrix

logger = logging.getLogger(__name__)

PHI_FLOOR = 1e-300

PhiLike = Union[StationaryDistribution, np.ndarray]


def _phi(phi: PhiLike) -> np.ndarray:
    return phi.phi if isinstance(phi, StationaryDistribution) else np.asarray(phi, dtype=np.float64)


# =============================================================================
# DOMAIN TYPES
# =============================================================================

@dataclass(frozen=True)
class HypergraphLaplacian:
    L: sp.csr_matrix

    def quadratic_form(self, x: np.ndarray) -> float:
        return float(x @ (self.L @ x))


@dataclass(frozen=True)
class SymLaplacian:
    """
    L_sym together with sqrt(phi), its null vector.

    `L_sym` is None when P was only available as an operator; `operator` always works.
    """

    L_sym: Optional[sp.csr_matrix]
    sqrt_phi: np.ndarray
    operator: LinearOperator

    @property
    def n(self) -> int:
        return len(self.sqrt_phi)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.operator.matvec(x)

    def toarray(self) -> np.ndarray:
        if self.L_sym is not None:
            return self.L_sym.toarray()
        dense = self.operator.matmat(np.eye(self.n))
        # operator products are symmetric only up to rounding
        return (dense + dense.T) / 2


# =============================================================================
# CONSTRUCTION
# =============================================================================

def laplacian(P: TransitionMatrix, phi: PhiLike) -> HypergraphLaplacian:
    """
    L = Pi - (M + M^T)/2 with M = Pi P.

    Entry (u, v) and (v, u) are both M[u,v]/2 + M[v,u]/2 summed in the same order, so L is
    symmetric bit for bit.
    """
    if not P.is_explicit:
        raise InputError("laplacian() needs an explicit transition matrix")
    phi = _phi(phi)
    if len(phi) != P.n:
        raise LengthMismatch(f"phi has length {len(phi)}, P has {P.n} vertices")
    M = sp.diags(phi) @ P.P
    L = sp.diags(phi) - (M + M.T) * 0.5
    L = sp.csr_matrix(L)
    L.sum_duplicates()
    L.sort_indices()
    return HypergraphLaplacian(L=L)


def _sqrt_phi(phi: np.ndarray) -> np.ndarray:
    low = np.flatnonzero(phi < PHI_FLOOR)
    if len(low):
        raise DegenerateStationary(
            f"Stationary probability below {PHI_FLOOR:.0e} at {len(low)} vertex/vertices (first: {low[0]})"
        )
    return np.sqrt(phi)


def _sym_operator(P: TransitionMatrix, sqrt_phi: np.ndarray) -> LinearOperator:
    """x -> x - (Pi^1/2 P Pi^-1/2 x + Pi^-1/2 P^T Pi^1/2 x)/2."""
    n = len(sqrt_phi)

    def matvec(x):
        x = np.asarray(x, dtype=np.float64).ravel()
        forward = sqrt_phi * P.matvec(x / sqrt_phi)
        backward = P.rmatvec(sqrt_phi * x) / sqrt_phi
        return x - 0.5 * (forward + backward)

    return LinearOperator((n, n), matvec=matvec, rmatvec=matvec, dtype=np.float64)


def sym_laplacian(L: HypergraphLaplacian, phi: PhiLike) -> SymLaplacian:
    """
    L_sym(u, v) = L(u, v) / sqrt(phi(u) phi(v)).

    Raises:
        DegenerateStationary: some phi(u) < 1e-300
    """
    phi = _phi(phi)
    sqrt_phi = _sqrt_phi(phi)
    inv = 1.0 / sqrt_phi
    coo = L.L.tocoo()
    # inv[r] * inv[c] is commutative, so mirrored entries stay equal
    data = coo.data * (inv[coo.row] * inv[coo.col])
    L_sym = sp.csr_matrix((data, (coo.row, coo.col)), shape=L.L.shape)
    L_sym.sort_indices()
    op = LinearOperator(L_sym.shape, matvec=lambda x: L_sym @ x, rmatvec=lambda x: L_sym @ x, dtype=np.float64)
    return SymLaplacian(L_sym=L_sym, sqrt_phi=sqrt_phi, operator=op)


def sym_laplacian_from_walk(P: TransitionMatrix, phi: PhiLike) -> SymLaplacian:
    """L_sym from the walk; explicit when P is, operator-only otherwise."""
    if P.is_explicit:
        return sym_laplacian(laplacian(P, phi), phi)
    sqrt_phi = _sqrt_phi(_phi(phi))
    return SymLaplacian(L_sym=None, sqrt_phi=sqrt_phi, operator=_sym_operator(P, sqrt_phi))


# =============================================================================
# RAYLEIGH QUOTIENT
# =============================================================================

def rayleigh_quotient(x: np.ndarray, phi: PhiLike, P: TransitionMatrix) -> float:
    """
    R(x) = sum_{u,v} (x(u) - x(v))^2 phi(u) P[u,v] / sum_u x(u)^2 phi(u).

    Evaluated as a direct sum over the nonzeros of P, independent of the Laplacian.

    Raises:
        ZeroVector: x is identically zero
    """
    x = np.asarray(x, dtype=np.float64)
    phi = _phi(phi)
    if len(x) != P.n or len(phi) != P.n:
        raise LengthMismatch(f"x has length {len(x)}, phi {len(phi)}, P has {P.n} vertices")
    if not np.any(x):
        raise ZeroVector("Rayleigh quotient of the zero vector is undefined")

    denominator = float(np.sum(x * x * phi))
    if P.is_explicit:
        coo = P.P.tocoo()
        diff = x[coo.row] - x[coo.col]
        numerator = float(np.sum(diff * diff * phi[coo.row] * coo.data))
    else:
        # expand (x_u - x_v)^2 and use P 1 = 1
        numerator = float(np.sum(phi * (x * x - 2.0 * x * P.matvec(x) + P.matvec(x * x))))
    return numerator / denominator
