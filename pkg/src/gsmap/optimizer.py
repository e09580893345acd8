"""Negative-sampling SGD that fits an embedding to a fuzzy graph."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _backend
from .errors import ConfigError, InputError, NumericError
from .lowdim import DIST_EPS, REPULSION_FLOOR, KernelParams

# callback(epoch, n_sampled_edges, loss_estimate_or_None)
ProgressCallback = Callable[[int, int, Optional[float]], None]


@dataclass
class OptimizerConfig:
    """SGD settings.

    ``neg_samples=0`` disables repulsion entirely, which is only useful for
    testing. ``threads > 1`` switches to lock-free parallel updates and gives
    up bit reproducibility.
    """

    n_epochs: int = 500
    neg_samples: int = 5
    lr_initial: float = 1.0
    clip: float = 4.0
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.n_epochs < 1:
            raise ConfigError(f"n_epochs must be >= 1, got {self.n_epochs}")
        if self.neg_samples < 0:
            raise ConfigError(f"neg_samples must be >= 0, got {self.neg_samples}")
        if not self.lr_initial > 0:
            raise ConfigError(f"lr_initial must be > 0, got {self.lr_initial}")
        if not self.clip > 0:
            raise ConfigError(f"clip must be > 0, got {self.clip}")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")


@dataclass
class EdgeSchedule:
    epochs_per_sample: np.ndarray


def make_schedule(graph, n_epochs: int = 500) -> EdgeSchedule:
    """Edge ``e`` is visited every ``max_weight / weight[e]`` epochs."""
    w = np.asarray(graph.weights, dtype=np.float64)
    if w.size == 0:
        raise InputError("graph has no edges")
    if np.any(~(w > 0)):
        raise InputError("edge weights must be positive")
    return EdgeSchedule(w.max() / w)


def sample_counts(schedule: EdgeSchedule, n_epochs: int) -> np.ndarray:
    """How many times each edge is processed over ``n_epochs`` (mirrors the kernel loop)."""
    eps = schedule.epochs_per_sample
    nxt = eps.copy()
    counts = np.zeros(len(eps), dtype=np.int64)
    for epoch in range(n_epochs):
        hit = nxt <= epoch + 1
        counts += hit
        nxt[hit] += eps[hit]
    return counts


def optimize(emb, graph, kernel: KernelParams, cfg: OptimizerConfig | None = None,
             callback: ProgressCallback | None = None, backend=None) -> np.ndarray:
    """Run SGD from ``emb`` and return the optimized copy.

    Each scheduled edge ``(i, j)`` pulls both endpoints together, then
    ``cfg.neg_samples`` vertices drawn uniformly from all vertices except
    ``i`` push ``y_i`` away. The learning rate decays linearly to zero and
    every coordinate step is clipped to ``clip * lr``.
    """
    cfg = cfg or OptimizerConfig()
    Y = np.array(emb, dtype=np.float64, order="C", copy=True)
    if Y.ndim != 2:
        raise InputError(f"embedding must be 2-D, got shape {Y.shape}")
    if Y.shape[0] != graph.n_vertices:
        raise InputError(f"embedding has {Y.shape[0]} rows but graph has {graph.n_vertices} vertices")
    if Y.shape[0] < 2:
        raise InputError("need at least two points")
    if not np.all(np.isfinite(Y)):
        raise NumericError("initial embedding has non-finite coordinates")

    schedule = make_schedule(graph, cfg.n_epochs)
    kernels = _backend.get_kernels(backend)
    bad_epoch, bad_edge = kernels.optimize_layout(
        Y,
        np.ascontiguousarray(graph.head, dtype=np.int64),
        np.ascontiguousarray(graph.tail, dtype=np.int64),
        schedule.epochs_per_sample,
        int(cfg.n_epochs),
        float(kernel.a),
        float(kernel.b),
        int(cfg.neg_samples),
        float(cfg.lr_initial),
        float(cfg.clip),
        DIST_EPS,
        REPULSION_FLOOR,
        int(cfg.seed),
        int(cfg.threads),
        callback,
    )
    if bad_epoch >= 0:
        raise NumericError(f"non-finite update at epoch {bad_epoch}, edge {bad_edge} "
                           f"({graph.head[bad_edge]}, {graph.tail[bad_edge]})")
    if not np.all(np.isfinite(Y)):
        raise NumericError("optimization produced non-finite coordinates")
    return Y
