"""Pure-Python kernels.

Reference implementation of the hot loops in ``_kernels.pyx``. The SGD loop
performs the same floating point operations in the same order as the compiled
version, so with ``threads=1`` both produce identical embeddings.
"""
import math

import numpy as np

_M64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(state):
    state = (state + _GOLDEN) & _M64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return state, z ^ (z >> 31)


def knn_euclidean(X, k, threads=1):
    """Exact k nearest neighbors by brute force, ties broken by smaller index."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    n, dim = X.shape
    indices = np.empty((n, k), dtype=np.int64)
    distances = np.empty((n, k), dtype=np.float64)
    block = max(1, (1 << 23) // max(1, n * dim))
    for start in range(0, n, block):
        stop = min(n, start + block)
        diff = X[start:stop, None, :] - X[None, :, :]
        dist = np.sqrt(np.einsum("bnd,bnd->bn", diff, diff))
        for r, i in enumerate(range(start, stop)):
            row = dist[r]
            row[i] = np.inf
            order = np.argsort(row, kind="stable")[:k]
            indices[i] = order
            distances[i] = row[order]
    return indices, distances


def _attractive_coef(d, a, b, c):
    return -a * b * c * math.pow(d, a - 2.0) / (1.0 + c * math.pow(d, a))


def _repulsive_coef(d, a, b, c, floor):
    base = 1.0 + c * math.pow(d, a)
    q = math.pow(base, -b)
    one_minus_q = 1.0 - q
    if one_minus_q < floor:
        one_minus_q = floor
    return a * b * c * math.pow(base, -b - 1.0) * math.pow(d, a - 2.0) / one_minus_q


def _clip(v, clip):
    if v > clip:
        return clip
    if v < -clip:
        return -clip
    return v


def optimize_layout(Y, head, tail, epochs_per_sample, n_epochs, a, b, neg_samples,
                    lr0, clip, eps, rep_floor, seed, threads=1, callback=None):
    """Negative-sampling SGD over the scheduled edges; updates ``Y`` in place.

    Returns ``(-1, -1)`` on success, otherwise the ``(epoch, edge)`` at which a
    non-finite update was produced. ``threads`` is accepted for signature
    parity; this implementation always runs sequentially.
    """
    n, dim = Y.shape
    n_edges = len(head)
    c = math.pow(2.0, 1.0 / b) - 1.0
    next_sample = [float(x) for x in epochs_per_sample]
    eps_list = [float(x) for x in epochs_per_sample]
    head = [int(x) for x in head]
    tail = [int(x) for x in tail]
    rows = Y.tolist()
    state = int(seed) & _M64

    for epoch in range(n_epochs):
        lr = lr0 * (1.0 - epoch / n_epochs)
        t1 = float(epoch + 1)
        n_sampled = 0
        for e in range(n_edges):
            if next_sample[e] > t1:
                continue
            next_sample[e] += eps_list[e]
            n_sampled += 1
            i = head[e]
            j = tail[e]
            yi = rows[i]
            yj = rows[j]

            d2 = 0.0
            for s in range(dim):
                t = yi[s] - yj[s]
                d2 += t * t
            d = math.sqrt(d2)
            axis = -1
            if d == 0.0:
                state, z = _splitmix64(state)
                axis = z % dim
            dd = d if d >= eps else eps
            coef = _attractive_coef(dd, a, b, c)
            for s in range(dim):
                if axis >= 0:
                    delta = eps if s == axis else 0.0
                else:
                    delta = yi[s] - yj[s]
                    if d < eps:
                        delta = delta * (eps / d)
                g = _clip(coef * delta, clip)
                if g != g:
                    _rows_to_array(Y, rows)
                    return epoch, e
                yi[s] += lr * g
                yj[s] -= lr * g

            for _ in range(neg_samples):
                state, z = _splitmix64(state)
                kk = z % (n - 1)
                if kk >= i:
                    kk += 1
                yk = rows[kk]
                d2 = 0.0
                for s in range(dim):
                    t = yi[s] - yk[s]
                    d2 += t * t
                d = math.sqrt(d2)
                axis = -1
                if d == 0.0:
                    state, z = _splitmix64(state)
                    axis = z % dim
                dd = d if d >= eps else eps
                coef = _repulsive_coef(dd, a, b, c, rep_floor)
                for s in range(dim):
                    if axis >= 0:
                        delta = eps if s == axis else 0.0
                    else:
                        delta = yi[s] - yk[s]
                        if d < eps:
                            delta = delta * (eps / d)
                    g = _clip(coef * delta, clip)
                    if g != g:
                        _rows_to_array(Y, rows)
                        return epoch, e
                    yi[s] += lr * g
        if callback is not None:
            callback(epoch + 1, n_sampled, None)

    _rows_to_array(Y, rows)
    return -1, -1


def _rows_to_array(Y, rows):
    Y[...] = np.asarray(rows, dtype=np.float64)
