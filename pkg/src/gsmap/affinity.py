"""Calibrated fuzzy affinity graph in the input space."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError, DegenerateSigmaError, InputError

logger = logging.getLogger(__name__)

SIGMA_TOL = 1e-5
SIGMA_BRACKET = (1e-10, 1e6)
SIGMA_MAX_ITER = 100


@dataclass
class SmoothKnnParams:
    rho: np.ndarray
    sigma: np.ndarray
    # rows whose neighbor distances are all zero; they get sigma = 1
    degenerate: np.ndarray


@dataclass
class FuzzyGraph:
    """Undirected weighted graph stored as an edge list with ``head < tail``."""

    n_vertices: int
    head: np.ndarray
    tail: np.ndarray
    weights: np.ndarray

    @property
    def n_edges(self) -> int:
        return len(self.weights)

    def to_sparse(self) -> sp.csr_matrix:
        """Symmetric N x N CSR matrix of the weights."""
        rows = np.concatenate([self.head, self.tail])
        cols = np.concatenate([self.tail, self.head])
        data = np.concatenate([self.weights, self.weights])
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n_vertices, self.n_vertices))

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for i, j, w in zip(self.head.tolist(), self.tail.tolist(), self.weights.tolist()):
                fh.write(f"{i},{j},{w!r}\n")


def compute_rho(g) -> np.ndarray:
    """Smallest strictly positive neighbor distance per point, 0 if there is none."""
    d = np.asarray(g.distances, dtype=np.float64)
    masked = np.where(d > 0, d, np.inf)
    rho = masked.min(axis=1)
    rho[~np.isfinite(rho)] = 0.0
    return rho


def conditional_affinity(d, rho, sigma):
    """Directed membership ``1 / (1 + max(0, d - rho) / sigma)``; works elementwise on arrays."""
    sigma = np.asarray(sigma, dtype=np.float64)
    if np.any(sigma <= 0):
        raise ConfigError("sigma must be positive")
    out = 1.0 / (1.0 + np.maximum(0.0, np.asarray(d, dtype=np.float64) - rho) / sigma)
    return float(out) if np.ndim(out) == 0 else out


def _membership_sum(x, sigma):
    return (1.0 / (1.0 + x / sigma[:, None])).sum(axis=1)


def calibrate_sigmas(adjusted, target=None, tol=SIGMA_TOL):
    """Solve ``sum_j 1/(1 + adjusted[i, j]/sigma_i) = target`` for every row.

    Bisection runs in log space on distances normalized by the row maximum,
    which makes the result equivariant under rescaling of the distances. It
    always runs to full floating point resolution (or ``SIGMA_MAX_ITER``
    steps), so the residual ends far below ``tol`` whenever a root exists.

    Returns ``(sigma, degenerate)``. Rows with no positive adjusted distance
    are degenerate and get ``sigma = 1``. Rows whose zero entries alone
    already exceed ``target`` (ties at the nearest distance) have no root;
    they get the lower bracket end, so their tied neighbors keep weight ~1
    and all others ~0.
    """
    adjusted = np.atleast_2d(np.asarray(adjusted, dtype=np.float64))
    n, k = adjusted.shape
    if target is None:
        target = math.log2(k)
    scale = adjusted.max(axis=1)
    degenerate = ~(scale > 0)
    safe_scale = np.where(degenerate, 1.0, scale)
    x = adjusted / safe_scale[:, None]

    lo = np.full(n, SIGMA_BRACKET[0])
    hi = np.full(n, SIGMA_BRACKET[1])
    # expand the upper end until the sum reaches the target (only matters
    # for targets close to k)
    for _ in range(SIGMA_MAX_ITER):
        short = (_membership_sum(x, hi) < target) & ~degenerate
        if not short.any():
            break
        hi[short] *= 1e3
    for _ in range(SIGMA_MAX_ITER):
        mid = np.sqrt(lo * hi)
        above = _membership_sum(x, mid) > target
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
        if np.all(hi <= np.nextafter(lo, np.inf)):
            break
    sigma = 0.5 * (lo + hi)

    unsolvable = (_membership_sum(x, np.full(n, SIGMA_BRACKET[0])) > target + tol) & ~degenerate
    sigma[unsolvable] = SIGMA_BRACKET[0]
    if unsolvable.any():
        logger.warning("%d points have too many neighbors tied at rho; sigma set to bracket floor",
                       int(unsolvable.sum()))
    sigma = sigma * safe_scale
    sigma[degenerate] = 1.0
    return sigma, degenerate


def solve_sigma(adjusted_dists, k: int, tol: float = SIGMA_TOL) -> float:
    """Bandwidth for one point given its ``k`` adjusted distances ``max(0, d - rho)``."""
    adjusted = np.asarray(adjusted_dists, dtype=np.float64)
    if k < 2:
        raise ConfigError(f"k must be >= 2, got {k}")
    if adjusted.shape != (k,):
        raise InputError(f"expected {k} adjusted distances, got {adjusted.shape}")
    if not np.any(adjusted > 0):
        raise DegenerateSigmaError("all adjusted distances are zero; the calibration has no solution")
    sigma, _ = calibrate_sigmas(adjusted[None, :], math.log2(k), tol)
    return float(sigma[0])


def smooth_knn(g, tol: float = SIGMA_TOL) -> SmoothKnnParams:
    """Compute rho and sigma for every point of a neighbor graph."""
    if g.k < 2:
        raise ConfigError(f"bandwidth calibration needs k >= 2, got k={g.k}")
    rho = compute_rho(g)
    adjusted = np.maximum(0.0, g.distances - rho[:, None])
    sigma, degenerate = calibrate_sigmas(adjusted, math.log2(g.k), tol)
    if degenerate.any():
        logger.info("%d points have only zero-distance neighbors; sigma set to 1", int(degenerate.sum()))
    return SmoothKnnParams(rho, sigma, degenerate)


def conditional_matrix(g, params: SmoothKnnParams) -> sp.csr_matrix:
    """Sparse N x N matrix with entry (i, j) = P(j|i) for the k neighbors j of i."""
    n, k = g.indices.shape
    weights = conditional_affinity(g.distances, params.rho[:, None], params.sigma[:, None])
    weights = np.asarray(weights).reshape(n, k)
    weights[params.degenerate] = 1.0
    rows = np.repeat(np.arange(n), k)
    return sp.csr_matrix((weights.ravel(), (rows, g.indices.ravel())), shape=(n, n))


def symmetrize(conditional) -> FuzzyGraph:
    """Fuzzy union ``P_ij = p + q - p*q`` of the directed weights.

    The edge set is the union of directed edges. Results are clamped into
    ``[max(p, q), 1]`` to absorb last-bit rounding.
    """
    C = sp.csr_matrix(conditional, dtype=np.float64)
    if C.shape[0] != C.shape[1]:
        raise InputError(f"conditional matrix must be square, got {C.shape}")
    if C.nnz and (C.data.min() < 0 or C.data.max() > 1):
        raise InputError("directed weights must lie in [0, 1]")
    C.eliminate_zeros()
    upper = sp.triu(C, k=1).tocoo()
    lower = sp.triu(C.T.tocsr(), k=1).tocoo()
    n = C.shape[0]
    # pattern of the union; explicit ones so zero-weight cancellation can't drop an edge
    pattern = sp.coo_matrix((np.ones(upper.nnz + lower.nnz),
                             (np.concatenate([upper.row, lower.row]),
                              np.concatenate([upper.col, lower.col]))), shape=(n, n)).tocsr()
    pattern.sum_duplicates()
    pattern = pattern.tocoo()
    head, tail = pattern.row.astype(np.int64), pattern.col.astype(np.int64)
    order = np.lexsort((tail, head))
    head, tail = head[order], tail[order]

    p = np.asarray(C[head, tail]).ravel()   # P(tail | head)
    q = np.asarray(C[tail, head]).ravel()   # P(head | tail)
    w = p + q - p * q
    w = np.clip(w, np.maximum(p, q), 1.0)
    return FuzzyGraph(n, head, tail, w)


def fuzzy_graph(g, tol: float = SIGMA_TOL):
    """Neighbor graph -> (FuzzyGraph, SmoothKnnParams)."""
    params = smooth_knn(g, tol)
    return symmetrize(conditional_matrix(g, params)), params
