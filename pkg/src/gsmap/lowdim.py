"""Low-dimensional similarity kernel with tunable tail, its gradients and loss.

The kernel is ``Q(d) = [1 + (2**(1/b) - 1) * d**a] ** -b``. Every member of
the family passes through ``Q(0) = 1`` and ``Q(1) = 1/2``; smaller ``b``
gives a heavier tail. With ``a = 1, b = 1`` it coincides with the UMAP curve
``1 / (1 + a* d**(2 b*))`` at ``a* = 1, b* = 1/2``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

# below this separation forces are evaluated at distance DIST_EPS along delta
DIST_EPS = 1e-3
# floor on 1 - Q in the repulsive denominator
REPULSION_FLOOR = 1e-3


@dataclass(frozen=True)
class KernelParams:
    b: float
    a: float = 1.0

    def __post_init__(self):
        if not (self.a > 0 and math.isfinite(self.a)):
            raise ConfigError(f"a must be a positive finite number, got {self.a}")
        if not (self.b > 0 and math.isfinite(self.b)):
            raise ConfigError(f"b must be a positive finite number, got {self.b}")
        if not 1.0 <= self.a <= 1.5:
            warnings.warn(f"a={self.a} is outside the recommended range [1, 1.5]", stacklevel=3)

    @property
    def c(self) -> float:
        """The constant ``2**(1/b) - 1`` that pins ``Q(1) = 1/2``."""
        return math.pow(2.0, 1.0 / self.b) - 1.0


def q_similarity(dist, p: KernelParams):
    """Kernel value for a distance (scalar or array)."""
    d = np.asarray(dist, dtype=np.float64)
    out = (1.0 + p.c * d ** p.a) ** -p.b
    return float(out) if out.ndim == 0 else out


def umap_kernel(dist, a_star: float, b_star: float):
    """The UMAP low-dimensional curve ``1 / (1 + a* d**(2 b*))``."""
    d = np.asarray(dist, dtype=np.float64)
    out = 1.0 / (1.0 + a_star * d ** (2.0 * b_star))
    return float(out) if out.ndim == 0 else out


def _clamped(delta, rng=None):
    """Return ``delta`` stretched to length ``DIST_EPS`` if it is shorter, and its norm."""
    delta = np.asarray(delta, dtype=np.float64)
    d = float(np.linalg.norm(delta))
    if d >= DIST_EPS:
        return delta, d
    if d == 0.0:
        rng = np.random.default_rng() if rng is None else rng
        u = rng.standard_normal(delta.shape)
        return DIST_EPS * u / np.linalg.norm(u), DIST_EPS
    return delta * (DIST_EPS / d), DIST_EPS


def q_gradient(delta, p: KernelParams):
    """Gradient of ``Q(|y_i - y_j|)`` with respect to ``y_i``, given ``delta = y_i - y_j``.

    Zero-length ``delta`` is undefined for ``a < 2``; callers that can hit it
    should go through the force functions, which clamp.
    """
    delta = np.asarray(delta, dtype=np.float64)
    d = float(np.linalg.norm(delta))
    base = 1.0 + p.c * d ** p.a
    return -p.a * p.b * p.c * base ** (-p.b - 1.0) * d ** (p.a - 2.0) * delta


def attractive_force(delta, p: KernelParams, rng=None):
    """``(dQ/dy_i) / Q``: the ascent direction of ``log Q`` for an edge, pointing toward the neighbor."""
    delta, d = _clamped(delta, rng)
    return -p.a * p.b * p.c * d ** (p.a - 2.0) / (1.0 + p.c * d ** p.a) * delta


def repulsive_force(delta, p: KernelParams, rng=None, floor: float = REPULSION_FLOOR):
    """``-(dQ/dy_i) / (1 - Q)``: the ascent direction of ``log(1 - Q)``, pointing away."""
    delta, d = _clamped(delta, rng)
    base = 1.0 + p.c * d ** p.a
    one_minus_q = max(1.0 - base ** -p.b, floor)
    return p.a * p.b * p.c * base ** (-p.b - 1.0) * d ** (p.a - 2.0) / one_minus_q * delta


def _pair_distances(emb):
    diff = emb[:, None, :] - emb[None, :, :]
    return diff, np.sqrt((diff ** 2).sum(axis=-1))


def full_loss(graph, emb, p: KernelParams) -> float:
    """Cross-entropy over all unordered pairs: ``-sum_E P log Q - sum_notE log(1 - Q)``.

    O(N^2); meant as a test oracle on small instances. Distances are clamped
    at ``DIST_EPS`` so coincident points stay finite.
    """
    emb = np.asarray(emb, dtype=np.float64)
    n = emb.shape[0]
    _, dist = _pair_distances(emb)
    q = q_similarity(np.maximum(dist, DIST_EPS), p)
    weight = np.zeros((n, n))
    weight[graph.head, graph.tail] = graph.weights
    edge = np.zeros((n, n), dtype=bool)
    edge[graph.head, graph.tail] = True
    iu = np.triu_indices(n, k=1)
    w, e, qq = weight[iu], edge[iu], q[iu]
    return float(-(w[e] * np.log(qq[e])).sum() - np.log1p(-qq[~e]).sum())


def full_loss_gradient(graph, emb, p: KernelParams) -> np.ndarray:
    """Exact gradient of :func:`full_loss` (no clamping; points must be distinct)."""
    emb = np.asarray(emb, dtype=np.float64)
    n = emb.shape[0]
    weight = np.zeros((n, n))
    weight[graph.head, graph.tail] = graph.weights
    edge = np.zeros((n, n), dtype=bool)
    edge[graph.head, graph.tail] = True
    grad = np.zeros_like(emb)
    for i in range(n):
        for j in range(i + 1, n):
            delta = emb[i] - emb[j]
            dq = q_gradient(delta, p)
            q = q_similarity(np.linalg.norm(delta), p)
            g = -weight[i, j] * dq / q if edge[i, j] else dq / (1.0 - q)
            grad[i] += g
            grad[j] -= g
    return grad


def curve_table(b_values, a: float = 1.0, stop: float = 5.0, step: float = 0.01):
    """Distance grid and one kernel column per ``b`` (the tail-family plot data)."""
    n = int(round(stop / step)) + 1
    dist = np.round(np.arange(n) * step, 10)
    cols = [q_similarity(dist, KernelParams(b=b, a=a)) for b in b_values]
    return dist, np.column_stack(cols)
