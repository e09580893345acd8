"""Exact k-nearest-neighbor graphs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import ConfigError, InputError, NumericError


@dataclass
class NeighborGraph:
    """Neighbor ids and distances per point, each row sorted by ascending distance."""

    indices: np.ndarray
    distances: np.ndarray

    @property
    def k(self) -> int:
        return self.indices.shape[1]

    @property
    def n_points(self) -> int:
        return self.indices.shape[0]


def euclidean_distance(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise InputError(f"length mismatch: {x.shape} vs {y.shape}")
    diff = x - y
    return float(np.sqrt(np.dot(diff, diff)))


METRICS = {"euclidean": euclidean_distance}


def _knn_generic(X, k, metric):
    n = X.shape[0]
    indices = np.empty((n, k), dtype=np.int64)
    distances = np.empty((n, k), dtype=np.float64)
    for i in range(n):
        row = np.array([metric(X[i], X[j]) if j != i else np.inf for j in range(n)])
        order = np.argsort(row, kind="stable")[:k]
        indices[i] = order
        distances[i] = row[order]
    return indices, distances


def build_knn_graph(data, k: int, metric: str = "euclidean", threads: int = 1, backend=None) -> NeighborGraph:
    """Brute-force k nearest neighbors of every row of ``data``.

    ``data`` may be a ``DataMatrix`` or an array. Self-matches are excluded
    and ties are broken by the smaller index. Only ``"euclidean"`` runs on
    the compiled kernel; other registered metrics use a Python loop.
    """
    X = getattr(data, "values", data)
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise InputError(f"data must be 2-D, got shape {X.shape}")
    n = X.shape[0]
    if not 1 <= k <= n - 1:
        raise ConfigError(f"k={k} must satisfy 1 <= k <= N-1 = {n - 1}")
    if metric not in METRICS:
        raise ConfigError(f"unknown metric {metric!r}; available: {sorted(METRICS)}")

    if metric == "euclidean":
        indices, distances = _backend.get_kernels(backend).knn_euclidean(X, k, threads)
    else:
        indices, distances = _knn_generic(X, k, METRICS[metric])
    if not np.all(np.isfinite(distances)):
        raise NumericError("non-finite distance in kNN search")
    return NeighborGraph(np.asarray(indices, dtype=np.int64), np.asarray(distances))
