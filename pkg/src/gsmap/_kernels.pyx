# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: exact brute-force kNN and the negative-sampling SGD loop.

Mirrors ``_kernels_py`` operation for operation. Built without fast-math or
FMA contraction so sequential runs match the pure-Python kernel exactly.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, pow, INFINITY
from libc.stdint cimport uint64_t, int64_t
from cython.parallel cimport prange, threadid

cnp.import_array()

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL


cdef inline uint64_t splitmix64(uint64_t* state) noexcept nogil:
    cdef uint64_t z
    state[0] = state[0] + GOLDEN
    z = state[0]
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double attractive_coef(double d, double a, double b, double c) noexcept nogil:
    return -a * b * c * pow(d, a - 2.0) / (1.0 + c * pow(d, a))


cdef inline double repulsive_coef(double d, double a, double b, double c, double floor) noexcept nogil:
    cdef double base = 1.0 + c * pow(d, a)
    cdef double q = pow(base, -b)
    cdef double one_minus_q = 1.0 - q
    if one_minus_q < floor:
        one_minus_q = floor
    return a * b * c * pow(base, -b - 1.0) * pow(d, a - 2.0) / one_minus_q


cdef inline double clip_value(double v, double clip) noexcept nogil:
    if v > clip:
        return clip
    if v < -clip:
        return -clip
    return v


cdef void knn_row(const double[:, ::1] X, Py_ssize_t i, Py_ssize_t k,
                  int64_t[:, ::1] indices, double[:, ::1] distances) noexcept nogil:
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t dim = X.shape[1]
    cdef Py_ssize_t j, s, pos, filled = 0
    cdef double d2, t, d
    for j in range(n):
        if j == i:
            continue
        d2 = 0.0
        for s in range(dim):
            t = X[i, s] - X[j, s]
            d2 = d2 + t * t
        d = sqrt(d2)
        # j increases monotonically, so strict comparison keeps the
        # smaller index first among equal distances
        if filled == k and not (d < distances[i, k - 1]):
            continue
        pos = filled if filled < k else k - 1
        while pos > 0 and distances[i, pos - 1] > d:
            distances[i, pos] = distances[i, pos - 1]
            indices[i, pos] = indices[i, pos - 1]
            pos -= 1
        distances[i, pos] = d
        indices[i, pos] = j
        if filled < k:
            filled += 1


def knn_euclidean(X, Py_ssize_t k, int threads=1):
    """Exact k nearest neighbors by brute force, ties broken by smaller index."""
    cdef const double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t n = Xv.shape[0]
    out_idx = np.empty((n, k), dtype=np.int64)
    out_dist = np.full((n, k), np.inf, dtype=np.float64)
    cdef int64_t[:, ::1] idx = out_idx
    cdef double[:, ::1] dist = out_dist
    cdef Py_ssize_t i
    if threads > 1:
        for i in prange(n, nogil=True, num_threads=threads, schedule="dynamic"):
            knn_row(Xv, i, k, idx, dist)
    else:
        with nogil:
            for i in range(n):
                knn_row(Xv, i, k, idx, dist)
    return out_idx, out_dist


cdef int process_edge(double[:, ::1] Y, Py_ssize_t i, Py_ssize_t j, Py_ssize_t n,
                      int neg_samples, double a, double b, double c, double lr,
                      double clip, double eps, double rep_floor,
                      uint64_t* state) noexcept nogil:
    """Attractive update on (i, j) then ``neg_samples`` repulsive updates on i.

    Returns 1 if a non-finite gradient was produced, else 0.
    """
    cdef Py_ssize_t dim = Y.shape[1]
    cdef Py_ssize_t s, kk
    cdef int m
    cdef long axis
    cdef double d2, t, d, dd, coef, delta, g

    d2 = 0.0
    for s in range(dim):
        t = Y[i, s] - Y[j, s]
        d2 = d2 + t * t
    d = sqrt(d2)
    axis = -1
    if d == 0.0:
        axis = <long>(splitmix64(state) % <uint64_t>dim)
    dd = d if d >= eps else eps
    coef = attractive_coef(dd, a, b, c)
    for s in range(dim):
        if axis >= 0:
            delta = eps if s == axis else 0.0
        else:
            delta = Y[i, s] - Y[j, s]
            if d < eps:
                delta = delta * (eps / d)
        g = clip_value(coef * delta, clip)
        if g != g:
            return 1
        Y[i, s] = Y[i, s] + lr * g
        Y[j, s] = Y[j, s] - lr * g

    for m in range(neg_samples):
        kk = <Py_ssize_t>(splitmix64(state) % <uint64_t>(n - 1))
        if kk >= i:
            kk = kk + 1
        d2 = 0.0
        for s in range(dim):
            t = Y[i, s] - Y[kk, s]
            d2 = d2 + t * t
        d = sqrt(d2)
        axis = -1
        if d == 0.0:
            axis = <long>(splitmix64(state) % <uint64_t>dim)
        dd = d if d >= eps else eps
        coef = repulsive_coef(dd, a, b, c, rep_floor)
        for s in range(dim):
            if axis >= 0:
                delta = eps if s == axis else 0.0
            else:
                delta = Y[i, s] - Y[kk, s]
                if d < eps:
                    delta = delta * (eps / d)
            g = clip_value(coef * delta, clip)
            if g != g:
                return 1
            Y[i, s] = Y[i, s] + lr * g
    return 0


def optimize_layout(double[:, ::1] Y, const int64_t[::1] head, const int64_t[::1] tail,
                    epochs_per_sample, int n_epochs, double a, double b, int neg_samples,
                    double lr0, double clip, double eps, double rep_floor, seed,
                    int threads=1, callback=None):
    """Negative-sampling SGD over the scheduled edges; updates ``Y`` in place.

    Returns ``(-1, -1)`` on success, otherwise the ``(epoch, edge)`` at which a
    non-finite update was produced. With ``threads > 1`` edges are sharded
    across OpenMP threads that update ``Y`` without locks.
    """
    cdef Py_ssize_t n = Y.shape[0]
    cdef Py_ssize_t n_edges = head.shape[0]
    cdef double c = pow(2.0, 1.0 / b) - 1.0
    cdef double[::1] eps_arr = np.ascontiguousarray(epochs_per_sample, dtype=np.float64).copy()
    cdef double[::1] next_sample = np.ascontiguousarray(epochs_per_sample, dtype=np.float64).copy()
    cdef uint64_t state = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t base_state
    cdef uint64_t[::1] thread_states = np.zeros(max(threads, 1), dtype=np.uint64)
    # shared across threads; prange would make plain locals lastprivate
    cdef int64_t[::1] failure = np.full(2, -1, dtype=np.int64)
    cdef int epoch, tid
    cdef Py_ssize_t e
    cdef double lr, t1
    cdef long n_sampled
    cdef uint64_t* st

    for epoch in range(n_epochs):
        lr = lr0 * (1.0 - (<double>epoch) / n_epochs)
        t1 = <double>(epoch + 1)
        n_sampled = 0
        if threads > 1:
            base_state = state
            for tid in range(threads):
                base_state = base_state ^ (<uint64_t>(epoch + 1) * 0x9E3779B97F4A7C15ULL + <uint64_t>tid)
                thread_states[tid] = splitmix64(&base_state)
            for e in prange(n_edges, nogil=True, num_threads=threads, schedule="static"):
                if next_sample[e] > t1:
                    continue
                next_sample[e] = next_sample[e] + eps_arr[e]
                n_sampled += 1
                if process_edge(Y, head[e], tail[e], n, neg_samples, a, b, c, lr,
                                clip, eps, rep_floor, &thread_states[threadid()]):
                    failure[0] = epoch
                    failure[1] = e
        else:
            with nogil:
                for e in range(n_edges):
                    if next_sample[e] > t1:
                        continue
                    next_sample[e] = next_sample[e] + eps_arr[e]
                    n_sampled = n_sampled + 1
                    if process_edge(Y, head[e], tail[e], n, neg_samples, a, b, c, lr,
                                    clip, eps, rep_floor, &state):
                        failure[0] = epoch
                        failure[1] = e
                        break
        if failure[0] >= 0:
            return int(failure[0]), int(failure[1])
        if callback is not None:
            callback(epoch + 1, n_sampled, None)
    return -1, -1
