import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from gsmap.affinity import (
    calibrate_sigmas,
    compute_rho,
    conditional_affinity,
    conditional_matrix,
    fuzzy_graph,
    smooth_knn,
    solve_sigma,
    symmetrize,
)
from gsmap.errors import ConfigError, DegenerateSigmaError, InputError
from gsmap.knn import NeighborGraph, build_knn_graph


def _graph(dists):
    dists = np.atleast_2d(np.asarray(dists, dtype=float))
    idx = np.tile(np.arange(1, dists.shape[1] + 1), (dists.shape[0], 1))
    return NeighborGraph(idx, dists)


class TestRho:
    def test_min(self):
        assert compute_rho(_graph([1.0, 2.0, 9.0]))[0] == 1.0

    def test_zero_excluded(self):
        assert compute_rho(_graph([0.0, 0.5]))[0] == 0.5

    def test_all_zero(self):
        assert compute_rho(_graph([0.0, 0.0]))[0] == 0.0


class TestConditionalAffinity:
    def test_values(self):
        assert conditional_affinity(2.0, 2.0, 0.7) == 1.0
        assert conditional_affinity(2.7, 2.0, 0.7) == pytest.approx(0.5, abs=1e-15)
        assert conditional_affinity(2.0 + 3 * 0.7, 2.0, 0.7) == pytest.approx(0.25, abs=1e-15)
        assert conditional_affinity(1.0, 2.0, 0.7) == 1.0

    def test_bad_sigma(self):
        with pytest.raises(ConfigError):
            conditional_affinity(1.0, 0.0, 0.0)

    def test_strictly_decreasing(self):
        d = np.linspace(1.0, 10.0, 50)
        assert np.all(np.diff(conditional_affinity(d, 1.0, 0.3)) < 0)


def _oracle_sigma(adjusted, target):
    f = lambda s: sum(1.0 / (1.0 + x / s) for x in adjusted) - target
    return brentq(f, 1e-12, 1e12, xtol=1e-14, rtol=1e-14)


class TestSolveSigma:
    def test_known_value(self):
        # brentq oracle on the monotone scalar equation gives 0.8793852415718...
        sigma = solve_sigma([0, 1, 2, 3], 4)
        assert sigma == pytest.approx(0.87938524157, abs=1e-9)
        assert abs(sum(1 / (1 + x / sigma) for x in [0, 1, 2, 3]) - 2) <= 1e-5

    @pytest.mark.parametrize("c", [0.01, 1.0, 37.5])
    def test_closed_form(self, c):
        # 1 + 3/(1 + c/sigma) = 2  =>  sigma = c/2
        assert solve_sigma([0, c, c, c], 4) == pytest.approx(c / 2, rel=1e-12)

    def test_degenerate(self):
        with pytest.raises(DegenerateSigmaError):
            solve_sigma([0, 0, 0], 3)

    def test_matches_brentq(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            adj = np.concatenate([[0.0], np.sort(rng.exponential(size=9))])
            assert solve_sigma(adj, 10) == pytest.approx(_oracle_sigma(adj, math.log2(10)), rel=1e-10)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(0.0, 100.0), min_size=9, max_size=9),
           st.floats(1.01, 10.0))
    def test_monotone_in_distances(self, rest, factor):
        adj = np.array([0.0] + rest)
        if not np.any(adj > 1e-6):
            return
        # enlarging every positive adjusted distance raises sigma
        assert solve_sigma(adj * factor, 10) > solve_sigma(adj, 10)

    def test_ties_at_rho_exceeding_target(self):
        # five zeros already exceed log2(10); no root exists
        adj = np.array([0, 0, 0, 0, 0, 1, 1, 1, 1, 1.0])
        sigma = solve_sigma(adj, 10)
        assert sigma <= 1e-9


class TestCalibratedGraph:
    def test_row_sums(self):
        X = np.random.default_rng(1).normal(size=(300, 5))
        g = build_knn_graph(X, 10)
        params = smooth_knn(g)
        C = conditional_matrix(g, params)
        np.testing.assert_allclose(np.asarray(C.sum(axis=1)).ravel(), math.log2(10), atol=1e-5)

    def test_plug_in_row(self):
        g = NeighborGraph(np.array([[1, 2], [0, 2], [0, 1]]),
                          np.array([[1.0, 1.0 + 0.4], [1.0, 2.0], [1.4, 2.0]]))
        params = smooth_knn(g)
        C = conditional_matrix(g, params).toarray()
        # row 0: adjusted distances (0, 0.4); the second weight solves 1 + w = log2(2) = 1
        assert C[0, 1] == 1.0
        assert C[0, 0] == 0.0  # non-neighbor pair stays absent

    def test_plug_in_given_sigma(self):
        from gsmap.affinity import SmoothKnnParams

        g = NeighborGraph(np.array([[1, 2], [0, 2], [0, 1]]), np.array([[2.0, 2.5], [2.0, 3.0], [2.5, 3.0]]))
        params = SmoothKnnParams(np.array([2.0, 2.0, 2.5]), np.array([0.5, 1.0, 1.0]), np.zeros(3, bool))
        C = conditional_matrix(g, params).toarray()
        np.testing.assert_allclose(C[0, 1:], [1.0, 0.5])

    def test_degenerate_point_gets_unit_weights(self):
        X = np.array([[0.0, 0], [0, 0], [0, 0], [5, 5], [6, 5], [5, 7]])
        g = build_knn_graph(X, 2)
        params = smooth_knn(g)
        assert params.degenerate[:3].all() and params.sigma[0] == 1.0
        C = conditional_matrix(g, params).toarray()
        np.testing.assert_array_equal(C[0, [1, 2]], [1.0, 1.0])

    def test_scale_invariance(self):
        X = np.random.default_rng(3).normal(size=(200, 6))
        g = build_knn_graph(X, 10)
        p1 = smooth_knn(g)
        g2 = NeighborGraph(g.indices, g.distances * 7.3)
        p2 = smooth_knn(g2)
        np.testing.assert_allclose(p2.rho, 7.3 * p1.rho, rtol=1e-12)
        np.testing.assert_allclose(p2.sigma, 7.3 * p1.sigma, rtol=1e-10)
        G1, G2 = symmetrize(conditional_matrix(g, p1)), symmetrize(conditional_matrix(g2, p2))
        np.testing.assert_allclose(G1.weights, G2.weights, atol=1e-10)


class TestSymmetrize:
    def _pair(self, p, q):
        C = sp.csr_matrix(np.array([[0.0, p], [q, 0.0]]))
        return symmetrize(C)

    def test_examples(self):
        assert self._pair(0.5, 0.5).weights[0] == 0.75
        assert self._pair(1.0, 0.0).weights[0] == 1.0
        for p in (0.1, 0.3, 0.77):
            assert self._pair(p, 0.0).weights[0] == p

    def test_rejects_out_of_range(self):
        with pytest.raises(InputError):
            self._pair(1.5, 0.2)

    def test_edge_set_is_union(self):
        X = np.random.default_rng(4).normal(size=(100, 3))
        g = build_knn_graph(X, 5)
        G, _ = fuzzy_graph(g)
        expected = {(min(i, j), max(i, j)) for i in range(100) for j in g.indices[i]}
        assert set(zip(G.head.tolist(), G.tail.tolist())) == expected
        assert np.all(G.head < G.tail)
        assert len(expected) == G.n_edges

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**31))
    def test_bounds(self, seed):
        rng = np.random.default_rng(seed)
        n = 30
        M = rng.random((n, n)) * (rng.random((n, n)) < 0.2)
        np.fill_diagonal(M, 0)
        G = symmetrize(sp.csr_matrix(M))
        p, q = M[G.head, G.tail], M[G.tail, G.head]
        assert np.all(G.weights > 0) and np.all(G.weights <= 1)
        assert np.all(G.weights >= np.maximum(p, q))
        assert np.all(G.weights <= p + q)
        S = G.to_sparse().toarray()
        np.testing.assert_array_equal(S, S.T)


def test_graph_csv(tmp_path):
    G = symmetrize(sp.csr_matrix(np.array([[0, 0.5, 0], [0.5, 0, 0.25], [0, 0, 0]])))
    G.to_csv(tmp_path / "g.csv")
    assert (tmp_path / "g.csv").read_text() == "0,1,0.75\n1,2,0.25\n"


def test_calibrate_vectorized_matches_scalar():
    rng = np.random.default_rng(9)
    adj = np.column_stack([np.zeros(20), rng.exponential(size=(20, 9))])
    sig, deg = calibrate_sigmas(adj)
    assert not deg.any()
    for row, s in zip(adj, sig):
        assert solve_sigma(row, 10) == s
