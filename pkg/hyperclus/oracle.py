"""
Brute-force ground truth for small hypergraphs and the randomized property suite.

brute_force_optima() enumerates every bipartition (sets containing vertex 0, so each cut is
seen once) and checks the Cheeger and relaxation bounds against a dense eigensolve.
"""

import logging
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator

from .config import SolverConfig
from .errors import GenerationFailed, HyperclusError, InputError, TooLarge
from .hypergraph import EdvwHypergraph, build_hypergraph, check_connected
from .laplacian import laplacian, rayleigh_quotient, sym_laplacian_from_walk
from .metrics import batch_cut_volumes, conductance, indicator_vector, ncut2
from .random_walk import RandomWalk, TransitionMatrix, boundary_flux, random_walk
from .spectral import hyperclus_g, second_eigenpair

logger = logging.getLogger(__name__)

MAX_ORACLE_VERTICES = 20
MAX_GENERATION_RETRIES = 1000
BOUND_SLACK = 1e-9
CHUNK = 1 << 15

PROPERTY_NAMES = [
    "row-stochastic",
    "flux-equality",
    "rayleigh-identity",
    "indicator-identity",
    "optimum-identity",
    "conductance-le-ncut",
    "cheeger",
    "relaxation",
    "krylov-matches-dense",
]


# =============================================================================
# DOMAIN TYPES
# =============================================================================

@dataclass(frozen=True)
class OracleReport:
    best_ncut: Tuple[Tuple[int, ...], float]
    best_conductance: Tuple[Tuple[int, ...], float]
    lambda2_dense: float
    cheeger_ok: bool
    relaxation_ok: bool
    conductance_le_ncut: bool
    sets_checked: int

    def as_dict(self) -> dict:
        return {
            "best_ncut_set": list(self.best_ncut[0]),
            "best_ncut": self.best_ncut[1],
            "best_conductance_set": list(self.best_conductance[0]),
            "best_conductance": self.best_conductance[1],
            "lambda2_dense": self.lambda2_dense,
            "cheeger_ok": self.cheeger_ok,
            "relaxation_ok": self.relaxation_ok,
            "conductance_le_ncut": self.conductance_le_ncut,
            "sets_checked": self.sets_checked,
        }


@dataclass(frozen=True)
class PropertyResult:
    name: str
    ok: bool
    detail: str = ""


# =============================================================================
# DENSE SPECTRUM
# =============================================================================

def dense_spectrum(walk: RandomWalk) -> np.ndarray:
    """All eigenvalues of L_sym, ascending."""
    return np.linalg.eigvalsh(sym_laplacian_from_walk(walk.transition, walk.stationary).toarray())


# =============================================================================
# ENUMERATION
# =============================================================================

def _subset_masks(start: int, stop: int, n: int) -> np.ndarray:
    """Masks for codes start..stop-1; bit j of the code is vertex j+1, vertex 0 always in."""
    codes = np.arange(start, stop, dtype=np.int64)
    rest = ((codes[:, None] >> np.arange(n - 1, dtype=np.int64)) & 1).astype(bool)
    return np.hstack([np.ones((len(codes), 1), dtype=bool), rest])


def brute_force_optima(
    h: EdvwHypergraph,
    solver: Optional[SolverConfig] = None,
    walk: Optional[RandomWalk] = None,
    max_vertices: int = MAX_ORACLE_VERTICES,
) -> OracleReport:
    """
    Exact minimum NCut and conductance over all bipartitions, with spectral bound checks.

    Sets are enumerated in binary order of their members other than vertex 0; the first
    minimum in that order wins ties.

    Raises:
        TooLarge: more than max_vertices vertices
        Disconnected
    """
    n = h.n_vertices
    if n > max_vertices:
        raise TooLarge(f"Brute force is capped at {max_vertices} vertices, got {n}")
    walk = walk or random_walk(h, solver)
    phi = walk.phi
    P_dense = walk.transition.toarray()

    total = (1 << (n - 1)) - 1
    best_ncut_code, best_ncut = -1, np.inf
    best_cond_code, best_cond = -1, np.inf
    ordered = True
    for start in range(0, total, CHUNK):
        stop = min(start + CHUNK, total)
        masks = _subset_masks(start, stop, n)
        cut, vol_s, vol_c = batch_cut_volumes(phi, P_dense, masks)
        ncuts = (1.0 / vol_s + 1.0 / vol_c) * cut
        conds = cut / np.minimum(vol_s, vol_c)
        ordered &= bool(np.all(conds <= ncuts + 1e-12)) and bool(np.all((conds >= -1e-12) & (conds <= 1 + 1e-12)))
        i = int(np.argmin(ncuts))
        if ncuts[i] < best_ncut:
            best_ncut_code, best_ncut = start + i, float(ncuts[i])
        i = int(np.argmin(conds))
        if conds[i] < best_cond:
            best_cond_code, best_cond = start + i, float(conds[i])

    ncut_set = tuple(np.flatnonzero(_subset_masks(best_ncut_code, best_ncut_code + 1, n)[0]).tolist())
    cond_set = tuple(np.flatnonzero(_subset_masks(best_cond_code, best_cond_code + 1, n)[0]).tolist())
    ncut_star = ncut2(phi, walk.transition, list(ncut_set))
    phi_h = conductance(phi, walk.transition, list(cond_set))

    lambda2 = float(dense_spectrum(walk)[1])
    cheeger_ok = phi_h**2 / 2 - BOUND_SLACK <= lambda2 <= 2 * phi_h + BOUND_SLACK
    relaxation_ok = lambda2 <= 2 * ncut_star + BOUND_SLACK
    return OracleReport(
        best_ncut=(ncut_set, ncut_star),
        best_conductance=(cond_set, phi_h),
        lambda2_dense=lambda2,
        cheeger_ok=bool(cheeger_ok),
        relaxation_ok=bool(relaxation_ok),
        conductance_le_ncut=ordered,
        sets_checked=total,
    )


# =============================================================================
# RANDOM HYPERGRAPHS
# =============================================================================

def random_hypergraph(n: int, n_edges: int, max_edge_size: int, seed: int) -> EdvwHypergraph:
    """
    Seeded random connected EDVW hypergraph.

    Edge sizes are uniform in [2, min(max_edge_size, n)], members drawn without
    replacement, omega and gamma uniform in (0, 1]. Draws repeat until connected.

    Raises:
        GenerationFailed: no connected draw within 1000 attempts
    """
    if n < 2 or max_edge_size < 2 or n_edges < 1:
        raise InputError(f"Need n >= 2, max_edge_size >= 2, n_edges >= 1 (got {n}, {max_edge_size}, {n_edges})")
    rng = np.random.default_rng(seed)
    top = min(max_edge_size, n)
    for attempt in range(MAX_GENERATION_RETRIES):
        raw = []
        covered = np.zeros(n, dtype=bool)
        for _ in range(n_edges):
            size = int(rng.integers(2, top + 1))
            members = rng.choice(n, size=size, replace=False)
            omega = 1.0 - rng.random()
            gamma = 1.0 - rng.random(size)
            raw.append((float(omega), {int(v): float(g) for v, g in zip(members, gamma)}))
            covered[members] = True
        if not covered.all():
            continue
        h = build_hypergraph(raw, n, policy="strict")
        if check_connected(h):
            if attempt:
                logger.debug("Connected hypergraph after %d retries (seed %d)", attempt, seed)
            return h
    raise GenerationFailed(
        f"No connected hypergraph with n={n}, {n_edges} edges of size <= {top} in {MAX_GENERATION_RETRIES} attempts"
    )


# =============================================================================
# PROPERTY SUITE
# =============================================================================

def _corrupt(walk: RandomWalk) -> RandomWalk:
    """Test hook: scale the first row of P so it no longer sums to 1."""
    P = walk.transition.P.tolil(copy=True)
    P[0, :] = P[0, :] * 1.5
    P = P.tocsr()
    op = LinearOperator(P.shape, matvec=lambda x: P @ x, rmatvec=lambda x: P.T @ x, dtype=np.float64)
    return replace(walk, transition=TransitionMatrix(n=walk.transition.n, P=sp.csr_matrix(P), operator=op))


def _check(name: str, fn) -> PropertyResult:
    try:
        ok, detail = fn()
    except HyperclusError as e:
        return PropertyResult(name, False, f"{type(e).__name__}: {e}")
    return PropertyResult(name, bool(ok), detail)


def property_checks(
    h: EdvwHypergraph,
    seed: int = 0,
    solver: Optional[SolverConfig] = None,
    corrupt: bool = False,
) -> List[PropertyResult]:
    """Run every random-walk, Laplacian and spectral identity on one small hypergraph."""
    solver = solver or SolverConfig()
    walk = random_walk(h, solver)
    if corrupt:
        walk = _corrupt(walk)
    P, phi = walk.transition, walk.phi
    rng = np.random.default_rng(seed)
    n = h.n_vertices
    results = []

    def row_stochastic():
        err = float(np.max(np.abs(P.row_sums() - 1.0)))
        return err <= 1e-12, f"max |row sum - 1| = {err:.2e}"

    def flux_equality():
        worst = 0.0
        for _ in range(20):
            out_flux, in_flux = boundary_flux(phi, P, rng.random(n) < 0.5)
            worst = max(worst, abs(out_flux - in_flux))
        return worst <= 1e-9, f"max |out - in| = {worst:.2e}"

    def rayleigh_identity():
        L = laplacian(P, phi)
        worst = 0.0
        for _ in range(5):
            x = rng.standard_normal(n)
            r = rayleigh_quotient(x, phi, P)
            worst = max(worst, abs(r - 2 * L.quadratic_form(x) / float(x @ (phi * x))) / max(1.0, abs(r)))
        return worst <= 1e-9, f"max relative gap = {worst:.2e}"

    results.append(_check("row-stochastic", row_stochastic))
    results.append(_check("flux-equality", flux_equality))
    results.append(_check("rayleigh-identity", rayleigh_identity))

    try:
        partition = hyperclus_g(h, solver, walk=walk)
        report = brute_force_optima(h, solver, walk=walk)
    except HyperclusError as e:
        failure = f"{type(e).__name__}: {e}"
        results.extend(PropertyResult(name, False, failure) for name in PROPERTY_NAMES[3:])
        return results

    S = partition.members(0)

    def indicator_identity():
        gap = abs(ncut2(phi, P, S) - rayleigh_quotient(indicator_vector(phi, S), phi, P) / 2)
        return gap <= 1e-9, f"|NCut - R/2| = {gap:.2e}"

    def optimum_identity():
        best_set, best_value = report.best_ncut
        gap = abs(best_value - rayleigh_quotient(indicator_vector(phi, best_set), phi, P) / 2)
        return gap <= 1e-9, f"S* = {','.join(map(str, best_set))}, |NCut* - R/2| = {gap:.2e}"

    def relaxation():
        ncut_hg = ncut2(phi, P, S)
        ncut_star = report.best_ncut[1]
        ok = report.relaxation_ok and ncut_star <= ncut_hg + BOUND_SLACK
        return ok, f"lambda2/2 = {report.lambda2_dense / 2:.6f}, NCut* = {ncut_star:.6f}, NCut(hg) = {ncut_hg:.6f}"

    def krylov_matches_dense():
        if n < 4:
            return True, "skipped below 4 vertices"
        lsym = sym_laplacian_from_walk(P, phi)
        pair = second_eigenpair(lsym, tol=solver.eigen_tol, accept=solver.eigen_accept, dense_max_vertices=0)
        gap = abs(pair.value - report.lambda2_dense)
        return gap <= 1e-8, f"|lambda2 krylov - dense| = {gap:.2e}"

    phi_h = report.best_conductance[1]
    results.append(_check("indicator-identity", indicator_identity))
    results.append(_check("optimum-identity", optimum_identity))
    results.append(PropertyResult("conductance-le-ncut", report.conductance_le_ncut, f"{report.sets_checked} sets"))
    results.append(PropertyResult(
        "cheeger",
        report.cheeger_ok,
        f"{phi_h ** 2 / 2:.6f} <= {report.lambda2_dense:.6f} <= {2 * phi_h:.6f}",
    ))
    results.append(_check("relaxation", relaxation))
    results.append(_check("krylov-matches-dense", krylov_matches_dense))
    return results


def trial_parameters(n_max: int, seed: int) -> Tuple[int, int, int]:
    """(n, n_edges, max_edge_size) for one seeded trial."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(min(4, n_max), n_max + 1))
    n_edges = int(rng.integers(n // 2 + 1, 2 * n + 1))
    return n, n_edges, min(n, 4)


def run_property_suite(
    n_max: int,
    trials: int,
    seed: int,
    solver: Optional[SolverConfig] = None,
    corrupt: bool = False,
) -> List[Tuple[int, List[PropertyResult]]]:
    """property_checks on `trials` random hypergraphs; trial t uses seed + t."""
    if n_max > MAX_ORACLE_VERTICES:
        raise TooLarge(f"--n-max is capped at {MAX_ORACLE_VERTICES}, got {n_max}")
    if n_max < 2 or trials < 1:
        raise InputError(f"Need n_max >= 2 and trials >= 1 (got {n_max}, {trials})")
    outcomes = []
    for t in range(trials):
        trial_seed = seed + t
        n, n_edges, size = trial_parameters(n_max, trial_seed)
        h = random_hypergraph(n, n_edges, size, trial_seed)
        outcomes.append((trial_seed, property_checks(h, trial_seed, solver, corrupt)))
    return outcomes
