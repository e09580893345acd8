"""Embedding quality measures: k-means classification error, kNN preservation, ARI."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InputError
from .knn import build_knn_graph

MAX_LLOYD_ITER = 300


@dataclass
class ClusterAssignment:
    assignments: np.ndarray
    centroids: np.ndarray
    inertia: float
    # inertia after each Lloyd iteration of the winning restart
    history: list = field(default_factory=list)


def _sq_dists(X, C):
    return ((X[:, None, :] - C[None, :, :]) ** 2).sum(axis=-1)


def _kmeans_pp(X, k, rng):
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    closest = ((X - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = closest.sum()
        if total <= 0:
            idx = rng.integers(n)
        else:
            idx = int(np.searchsorted(np.cumsum(closest), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        centers[c] = X[idx]
        closest = np.minimum(closest, ((X - centers[c]) ** 2).sum(axis=1))
    return centers


def _lloyd(X, centers):
    history = []
    assign = None
    for _ in range(MAX_LLOYD_ITER):
        d = _sq_dists(X, centers)
        new_assign = d.argmin(axis=1)
        if assign is not None and np.array_equal(new_assign, assign):
            break
        assign = new_assign
        point_cost = d[np.arange(len(X)), assign]
        for c in range(len(centers)):
            members = assign == c
            if members.any():
                centers[c] = X[members].mean(axis=0)
            else:
                # re-seed an empty cluster at the worst-served point
                far = int(point_cost.argmax())
                centers[c] = X[far]
                assign[far] = c
                point_cost[far] = 0.0
        history.append(float(_sq_dists(X, centers)[np.arange(len(X)), assign].sum()))
    d = _sq_dists(X, centers)
    assign = d.argmin(axis=1)
    inertia = float(d[np.arange(len(X)), assign].sum())
    return assign, centers, inertia, history


def kmeans(emb, k: int, seed: int = 0, restarts: int = 10) -> ClusterAssignment:
    """Lloyd's algorithm from k-means++ seeds; best inertia over ``restarts`` runs."""
    X = np.asarray(emb, dtype=np.float64)
    if X.ndim != 2:
        raise InputError(f"embedding must be 2-D, got shape {X.shape}")
    if not 1 <= k <= X.shape[0]:
        raise ConfigError(f"k={k} must be between 1 and N={X.shape[0]}")
    if restarts < 1:
        raise ConfigError("restarts must be >= 1")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        assign, centers, inertia, history = _lloyd(X, _kmeans_pp(X, k, rng))
        if best is None or inertia < best.inertia:
            best = ClusterAssignment(assign, centers, inertia, history)
    return best


def cluster_error(assign, labels) -> float:
    """Fraction of points whose label differs from the majority label of their cluster."""
    clusters = np.asarray(getattr(assign, "assignments", assign))
    labels = np.asarray(labels)
    if clusters.shape != labels.shape:
        raise InputError(f"{len(clusters)} assignments vs {len(labels)} labels")
    if labels.size == 0:
        raise InputError("no labels")
    _, lab = np.unique(labels, return_inverse=True)
    _, clu = np.unique(clusters, return_inverse=True)
    table = np.zeros((clu.max() + 1, lab.max() + 1), dtype=np.int64)
    np.add.at(table, (clu, lab), 1)
    return float(1.0 - table.max(axis=1).sum() / labels.size)


def adjusted_rand_index(a, b) -> float:
    """Hubert-Arabie adjusted Rand index between two labelings."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise InputError("labelings differ in length")
    n = a.size
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    table = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(table, (ia, ib), 1)

    def pairs(x):
        x = np.asarray(x, dtype=np.float64)
        return (x * (x - 1) / 2).sum()

    index = pairs(table)
    sum_a = pairs(table.sum(axis=1))
    sum_b = pairs(table.sum(axis=0))
    expected = sum_a * sum_b / (n * (n - 1) / 2)
    max_index = (sum_a + sum_b) / 2
    if max_index == expected:
        return 1.0
    return float((index - expected) / (max_index - expected))


def knn_preservation(high, emb, k: int | None = None) -> float:
    """Mean fraction of each point's input-space k neighbors that stay k neighbors in the embedding."""
    emb = np.asarray(emb, dtype=np.float64)
    k = high.k if k is None else k
    if emb.shape[0] != high.n_points:
        raise InputError(f"embedding has {emb.shape[0]} rows, neighbor graph {high.n_points}")
    if not 1 <= k <= high.k:
        raise ConfigError(f"k={k} must be between 1 and the graph's k={high.k}")
    low = build_knn_graph(emb, k)
    hits = 0
    for hi_row, lo_row in zip(high.indices[:, :k], low.indices):
        hits += len(np.intersect1d(hi_row, lo_row, assume_unique=True))
    return hits / (k * emb.shape[0])


def format_report(values: dict) -> str:
    """Flat ``key=value`` lines."""
    lines = []
    for key, value in values.items():
        lines.append(f"{key}={value:.6g}" if isinstance(value, float) else f"{key}={value}")
    return "\n".join(lines) + "\n"
