"""Manifold embedding with a generalized-sigmoid low-dimensional kernel.

The hot loops (brute-force kNN and the SGD optimizer) run in a Cython
extension when it is built; otherwise an equivalent pure-Python module is
used. ``gsmap.BACKEND`` reports which one is active.
"""
from ._backend import BACKEND, COMPILED_AVAILABLE
from .affinity import FuzzyGraph, SmoothKnnParams, fuzzy_graph, smooth_knn, solve_sigma, symmetrize
from .dataio import (
    DataMatrix,
    DatasetBundle,
    center_by_condition,
    generate_gaussian_clusters,
    load_csv,
    load_idx,
    write_embedding_csv,
)
from .errors import ConfigError, GsmapError, InputError, NumericError
from .initialization import random_init, spectral_init
from .knn import NeighborGraph, build_knn_graph, euclidean_distance
from .lowdim import KernelParams, q_similarity, umap_kernel
from .metrics import adjusted_rand_index, cluster_error, kmeans, knn_preservation
from .optimizer import OptimizerConfig, optimize
from .pipeline import EmbeddingResult, embed

__version__ = "0.1.0"
