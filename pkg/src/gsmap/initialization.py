"""Initial embeddings: normalized-Laplacian eigenvectors, or seeded uniform noise."""
from __future__ import annotations

import logging

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, LinearOperator, eigsh

from .errors import InputError

logger = logging.getLogger(__name__)

DENSE_LIMIT = 2000
MAX_COORD = 10.0
JITTER = 1e-4
EIGSH_TOL = 1e-4
MAX_MATVEC = 5000


class _MatvecBudgetExceeded(RuntimeError):
    pass


def random_init(n: int, dim: int = 2, seed: int = 0, scale: float = 10.0) -> np.ndarray:
    if n < 1:
        raise InputError("need at least one point")
    rng = np.random.default_rng(seed)
    return rng.uniform(-scale, scale, size=(n, dim))


def _adjacency(graph):
    if sp.issparse(graph):
        W = sp.csr_matrix(graph, dtype=np.float64)
    elif hasattr(graph, "to_sparse"):
        W = graph.to_sparse()
    else:
        W = sp.csr_matrix(np.asarray(graph, dtype=np.float64))
    return W


def spectral_coordinates(graph, dim: int = 2) -> np.ndarray:
    """Eigenvectors of the symmetric normalized Laplacian, before rescaling.

    The trivial eigenvector ``D^{1/2} 1`` is deflated out, and the returned
    columns are ``D^{-1/2} u`` for the ``dim`` eigenvectors ``u`` of
    ``I - D^{-1/2} W D^{-1/2}`` with the smallest remaining eigenvalues, so
    they are mutually orthogonal in the degree-weighted inner product.
    Dense ``eigh`` up to ``DENSE_LIMIT`` vertices, ARPACK above.

    Raises ``ArpackNoConvergence``/``ArpackError`` or ``_MatvecBudgetExceeded``
    on solver failure.
    """
    W = _adjacency(graph)
    n = W.shape[0]
    deg = np.asarray(W.sum(axis=1)).ravel()
    inv_sqrt = np.zeros(n)
    inv_sqrt[deg > 0] = 1.0 / np.sqrt(deg[deg > 0])
    A = sp.diags(inv_sqrt) @ W @ sp.diags(inv_sqrt)
    trivial = np.sqrt(deg)
    trivial /= np.linalg.norm(trivial)

    if n <= DENSE_LIMIT:
        L = np.eye(n) - A.toarray()
        # push the trivial eigenvalue 0 past the top of the spectrum (<= 2)
        L += 3.0 * np.outer(trivial, trivial)
        _, vecs = np.linalg.eigh(L)
        u = vecs[:, :dim]
    else:
        # largest eigenvalues of the deflated A are the smallest nonzero of L
        calls = [0]

        def matvec(x):
            calls[0] += 1
            if calls[0] > MAX_MATVEC:
                raise _MatvecBudgetExceeded(f"eigensolver exceeded {MAX_MATVEC} matrix-vector products")
            x = np.asarray(x).ravel()
            return A @ x - 2.0 * trivial * (trivial @ x)

        op = LinearOperator((n, n), matvec=matvec, dtype=np.float64)
        v0 = np.random.default_rng(0).uniform(-1, 1, n)
        vals, vecs = eigsh(op, k=dim, which="LA", tol=EIGSH_TOL, v0=v0, ncv=min(n, max(2 * dim + 1, 20)))
        u = vecs[:, np.argsort(-vals)]
    return u * inv_sqrt[:, None]


def spectral_init(graph, dim: int = 2, seed: int = 0, jitter: bool = True) -> np.ndarray:
    """Spectral embedding scaled to max |coordinate| = 10, plus N(0, 1e-4^2) jitter.

    Falls back to :func:`random_init` when the graph has more than ``dim + 1``
    connected components or the eigensolver fails.
    """
    W = _adjacency(graph)
    n = W.shape[0]
    if n == 0:
        raise InputError("empty graph")
    if n < dim + 1:
        raise InputError(f"spectral init needs at least dim+1={dim + 1} vertices, got {n}")
    n_comp, _ = csgraph.connected_components(W, directed=False)
    if n_comp > dim + 1:
        logger.warning("graph has %d components (> dim+1); using random init", n_comp)
        return random_init(n, dim, seed)
    try:
        coords = spectral_coordinates(W, dim)
    except (ArpackNoConvergence, ArpackError, _MatvecBudgetExceeded, np.linalg.LinAlgError) as exc:
        logger.warning("spectral init failed (%s); using random init", exc)
        return random_init(n, dim, seed)
    peak = np.abs(coords).max()
    if not np.isfinite(peak) or peak == 0:
        return random_init(n, dim, seed)
    coords = coords * (MAX_COORD / peak)
    if jitter:
        coords = coords + np.random.default_rng(seed).normal(scale=JITTER, size=coords.shape)
    return coords
