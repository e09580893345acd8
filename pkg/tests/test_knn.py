import numpy as np
import pytest

from gsmap.errors import ConfigError, InputError
from gsmap.knn import build_knn_graph, euclidean_distance


def brute_force(X, k):
    """Full pairwise sort with (distance, index) ordering."""
    n = len(X)
    idx = np.empty((n, k), dtype=int)
    dist = np.empty((n, k))
    for i in range(n):
        cand = sorted((euclidean_distance(X[i], X[j]), j) for j in range(n) if j != i)[:k]
        dist[i] = [d for d, _ in cand]
        idx[i] = [j for _, j in cand]
    return idx, dist


def test_euclidean_examples():
    assert euclidean_distance([0, 0], [3, 4]) == 5
    x = [1.5, -2.0, 7.0]
    assert euclidean_distance(x, x) == 0
    assert euclidean_distance([1], [-1]) == 2
    with pytest.raises(InputError):
        euclidean_distance([1, 2], [1])


def test_line_k1(backend):
    g = build_knn_graph(np.array([[0.0], [1.0], [10.0]]), 1, backend=backend)
    np.testing.assert_array_equal(g.indices[:, 0], [1, 0, 1])
    np.testing.assert_array_equal(g.distances[:, 0], [1, 1, 9])


def test_line_k2(backend):
    g = build_knn_graph(np.array([[0.0], [1.0], [10.0]]), 2, backend=backend)
    np.testing.assert_array_equal(g.indices[0], [1, 2])
    np.testing.assert_array_equal(g.distances[0], [1, 10])


def test_k_too_large():
    X = np.random.default_rng(0).normal(size=(5, 2))
    with pytest.raises(ConfigError):
        build_knn_graph(X, 5)
    with pytest.raises(ConfigError):
        build_knn_graph(X, 0)


def test_ties_broken_by_index(backend):
    # point 0 is equidistant from 1, 2, 3, 4
    X = np.array([[0.0, 0], [1, 0], [0, 1], [-1, 0], [0, -1]])
    g = build_knn_graph(X, 3, backend=backend)
    np.testing.assert_array_equal(g.indices[0], [1, 2, 3])


def test_duplicates_allowed_as_neighbors(backend):
    X = np.array([[0.0, 0], [0, 0], [5, 5]])
    g = build_knn_graph(X, 1, backend=backend)
    assert g.indices[0, 0] == 1 and g.distances[0, 0] == 0


@pytest.mark.parametrize("seed", range(3))
def test_matches_brute_force_oracle(seed, backend):
    rng = np.random.default_rng(seed)
    n = [200, 57, 120][seed]
    X = rng.normal(size=(n, 4))
    for k in (1, 5, n - 1):
        g = build_knn_graph(X, k, backend=backend)
        idx, dist = brute_force(X, k)
        np.testing.assert_array_equal(g.indices, idx)
        np.testing.assert_allclose(g.distances, dist, rtol=1e-12)
        assert np.all(g.indices != np.arange(n)[:, None])
        assert np.all(np.diff(g.distances, axis=1) >= 0)


def test_permutation_gives_isomorphic_graph(backend):
    rng = np.random.default_rng(7)
    X = rng.normal(size=(80, 3))
    perm = rng.permutation(80)
    g = build_knn_graph(X, 6, backend=backend)
    gp = build_knn_graph(X[perm], 6, backend=backend)
    # row r of gp is point perm[r]; map its neighbor ids back
    for r in range(80):
        assert set(perm[gp.indices[r]]) == set(g.indices[perm[r]])
        np.testing.assert_allclose(gp.distances[r], g.distances[perm[r]], rtol=1e-12)


def test_generic_metric_path(monkeypatch):
    from gsmap import knn

    monkeypatch.setitem(knn.METRICS, "manhattan", lambda x, y: float(np.abs(x - y).sum()))
    g = build_knn_graph(np.array([[0.0, 0], [1, 1], [3, 0]]), 1, metric="manhattan")
    # point 2 is at distance 3 from both others; the smaller index wins
    np.testing.assert_array_equal(g.indices[:, 0], [1, 0, 0])
    np.testing.assert_array_equal(g.distances[:, 0], [2, 2, 3])


def test_threads_do_not_change_result():
    X = np.random.default_rng(2).normal(size=(150, 5))
    a = build_knn_graph(X, 7, threads=1)
    b = build_knn_graph(X, 7, threads=3)
    np.testing.assert_array_equal(a.indices, b.indices)
    np.testing.assert_array_equal(a.distances, b.distances)
