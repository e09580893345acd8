"""End-to-end embedding: kNN graph, fuzzy affinities, initialization, SGD."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .affinity import FuzzyGraph, fuzzy_graph
from .errors import ConfigError
from .initialization import random_init, spectral_init
from .knn import NeighborGraph, build_knn_graph
from .lowdim import KernelParams
from .optimizer import OptimizerConfig, optimize


@dataclass
class EmbeddingResult:
    embedding: np.ndarray
    knn: NeighborGraph
    graph: FuzzyGraph
    initial: np.ndarray
    timings: dict = field(default_factory=dict)


def embed(data, b: float, k: int = 10, a: float = 1.0, dim: int = 2, n_epochs: int = 500,
          neg_samples: int = 5, lr: float = 1.0, init: str = "spectral", seed: int = 0,
          threads: int = 1, callback=None, backend=None) -> EmbeddingResult:
    """Embed the rows of ``data`` into ``dim`` dimensions.

    Defaults follow the reference protocol: 10 neighbors, ``a = 1``, 2-D
    output, 500 epochs, spectral initialization. ``b`` has no default.
    """
    if init not in ("spectral", "random"):
        raise ConfigError(f"init must be 'spectral' or 'random', got {init!r}")
    if dim < 1:
        raise ConfigError(f"dim must be >= 1, got {dim}")
    kernel = KernelParams(b=b, a=a)
    cfg = OptimizerConfig(n_epochs=n_epochs, neg_samples=neg_samples, lr_initial=lr, seed=seed,
                          threads=threads)
    timings = {}

    t0 = time.perf_counter()
    knn = build_knn_graph(data, k, threads=threads, backend=backend)
    timings["knn"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    graph, _ = fuzzy_graph(knn)
    timings["affinity"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    if init == "spectral":
        initial = spectral_init(graph, dim, seed)
    else:
        initial = random_init(graph.n_vertices, dim, seed)
    timings["init"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    emb = optimize(initial, graph, kernel, cfg, callback=callback, backend=backend)
    timings["optimize"] = time.perf_counter() - t0
    return EmbeddingResult(emb, knn, graph, initial, timings)
