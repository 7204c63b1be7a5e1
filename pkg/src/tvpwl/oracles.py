"""Slow, independent reference computations used to cross-check the fast paths.

Nothing here calls into the code paths it is meant to check.
"""
import math

import numpy as np

__all__ = [
    "grad_loops",
    "div_loops",
    "inner_loops",
    "golden_section_prox_rstar",
    "tvpwl_grid_search_1x2",
]

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def grad_loops(u, h=1.0):
    M, N = len(u), len(u[0])
    g = np.zeros((2, M, N))
    for i in range(M):
        for j in range(N):
            if i < M - 1:
                g[0, i, j] = (u[i + 1][j] - u[i][j]) / h
            if j < N - 1:
                g[1, i, j] = (u[i][j + 1] - u[i][j]) / h
    return g


def div_loops(p, h=1.0):
    """Three-case backward stencil, written out per pixel."""
    _, M, N = np.shape(p)
    out = np.zeros((M, N))
    for i in range(M):
        for j in range(N):
            a = 0.0
            if M > 1:
                if i == 0:
                    a = p[0][i][j]
                elif i == M - 1:
                    a = -p[0][i - 1][j]
                else:
                    a = p[0][i][j] - p[0][i - 1][j]
            b = 0.0
            if N > 1:
                if j == 0:
                    b = p[1][i][j]
                elif j == N - 1:
                    b = -p[1][i][j - 1]
                else:
                    b = p[1][i][j] - p[1][i][j - 1]
            out[i, j] = (a + b) / h
    return out


def inner_loops(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    total = 0.0
    if a.ndim == 2:
        for i in range(a.shape[0]):
            for j in range(a.shape[1]):
                total += a[i, j] * b[i, j]
        return total
    weights = (1.0, 1.0, 2.0) if a.shape[0] == 3 else (1.0, 1.0)
    for c in range(a.shape[0]):
        for i in range(a.shape[1]):
            for j in range(a.shape[2]):
                total += weights[c] * a[c, i, j] * b[c, i, j]
    return total


def golden_section_prox_rstar(p_diamond, sigma, gamma, iters=120):
    """Minimise ``sigma*gamma*|p| + |p - p_diamond|^2 / 2`` over ``|p| <= 1``.

    Vectorised over leading axes: `p_diamond` has shape ``(2, K)`` and
    `sigma`, `gamma` broadcast against ``(K,)``. The minimiser lies on the
    ray through `p_diamond`, ``p = a * p_diamond`` with ``a in [0, 1/n]``, and
    ``a`` is found by golden-section search on

        phi(a) = sigma*gamma*n*a + n^2 a^2 / 2 - n^2 a.

    Function values are compared through the exact factored difference
    ``phi(x) - phi(y) = (x - y) * (n^2 (x + y)/2 + sigma*gamma*n - n^2)`` so the
    search is not limited to ``sqrt(eps)`` resolution.
    """
    p = np.asarray(p_diamond, dtype=np.float64)
    shape = p.shape
    p = p.reshape(2, -1)
    n = np.sqrt(p[0] ** 2 + p[1] ** 2)
    sg = np.broadcast_to(np.asarray(sigma, dtype=np.float64) * np.asarray(gamma, dtype=np.float64),
                         shape[1:]).reshape(-1)
    safe_n = np.where(n > 0, n, 1.0)
    lo = np.zeros_like(n)
    hi = 1.0 / safe_n

    def less(x, y):
        # phi(x) < phi(y)
        return (x - y) * (0.5 * n * n * (x + y) + sg * n - n * n) < 0

    for _ in range(iters):
        x1 = hi - _INVPHI * (hi - lo)
        x2 = lo + _INVPHI * (hi - lo)
        left = ~less(x2, x1)  # minimiser in [lo, x2]
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
    a = 0.5 * (lo + hi)
    # the constrained minimum may sit on an endpoint of [0, 1/n]
    for end in (np.zeros_like(n), 1.0 / safe_n):
        a = np.where(less(end, a), end, a)
    a = np.where(n > 0, a, 0.0)
    return (a * p).reshape(shape)


def tvpwl_grid_search_1x2(u, gamma, step=1e-3):
    """Brute-force ``min_g |grad u - g|`` over a grid of feasible ``g`` for a 1x2 image.

    Only the first pixel has a nonzero gradient (in the column direction),
    so ``g`` ranges over ``g = (g1, g2)`` with ``|g| <= gamma[0]`` on a
    square lattice of spacing `step`; the second pixel contributes
    ``max(0 - gamma, 0) = 0`` at best.
    """
    u = np.asarray(u, dtype=np.float64).reshape(1, 2)
    g0 = float(np.asarray(gamma, dtype=np.float64).reshape(-1)[0])
    d = (0.0, u[0, 1] - u[0, 0])
    ticks = np.arange(-g0, g0 + step / 2, step) if g0 > 0 else np.zeros(1)
    G1, G2 = np.meshgrid(ticks, ticks, indexing="ij")
    feasible = G1 ** 2 + G2 ** 2 <= g0 * g0 + 1e-15
    cost = np.sqrt((d[0] - G1) ** 2 + (d[1] - G2) ** 2)
    return float(np.min(cost[feasible]))
