"""Forward-difference gradient, its negative adjoint (divergence), and the
symmetrised gradient used by the TGV baseline. Neumann boundary: the last
row (for d/di) and last column (for d/dj) of every difference are zero.
"""
import numpy as np

from .grid import inner

__all__ = [
    "grad",
    "div",
    "sym_grad",
    "sym_div",
    "opnorm_estimate",
    "power_iteration",
]


def _check_h(h):
    if not h > 0:
        raise ValueError(f"grid spacing must be positive, got {h}")


def _d1(u, h):
    out = np.zeros_like(u)
    out[:-1, :] = (u[1:, :] - u[:-1, :]) / h
    return out


def _d2(u, h):
    out = np.zeros_like(u)
    out[:, :-1] = (u[:, 1:] - u[:, :-1]) / h
    return out


def _b1(p, h):
    # negative adjoint of _d1
    out = np.empty_like(p)
    M = p.shape[0]
    if M == 1:
        out[...] = 0.0
        return out
    out[0, :] = p[0, :]
    out[1:-1, :] = p[1:-1, :] - p[:-2, :]
    out[-1, :] = -p[-2, :]
    return out / h


def _b2(p, h):
    out = np.empty_like(p)
    N = p.shape[1]
    if N == 1:
        out[...] = 0.0
        return out
    out[:, 0] = p[:, 0]
    out[:, 1:-1] = p[:, 1:-1] - p[:, :-2]
    out[:, -1] = -p[:, -2]
    return out / h


def grad(u, h=1.0):
    """Forward-difference gradient with Neumann boundary.

    Parameters
    ----------
    u : ndarray, shape (M, N)
    h : float
        Pixel spacing.

    Returns
    -------
    ndarray, shape (2, M, N)
        ``(d/di u, d/dj u)``; the last row of the first plane and the last
        column of the second plane are zero.
    """
    _check_h(h)
    u = np.asarray(u, dtype=np.float64)
    out = np.zeros((2,) + u.shape)
    out[0, :-1, :] = u[1:, :] - u[:-1, :]
    out[1, :, :-1] = u[:, 1:] - u[:, :-1]
    if h != 1.0:
        out /= h
    return out


def div(p, h=1.0):
    """Backward-difference divergence, ``div = -grad^T``.

    Row ``i = 0`` takes ``p1[0]``, interior rows ``p1[i] - p1[i-1]``, the last
    row ``-p1[M-2]``; likewise for columns with ``p2``. A dimension of length
    one contributes nothing.
    """
    _check_h(h)
    p = np.asarray(p, dtype=np.float64)
    return _b1(p[0], h) + _b2(p[1], h)


def sym_grad(w, h=1.0):
    """Symmetrised gradient ``(Jw + Jw^T)/2`` of a vector field.

    Returns planes ``(d1 w1, d2 w2, (d2 w1 + d1 w2)/2)`` built from the same
    forward differences as :func:`grad`.
    """
    _check_h(h)
    w = np.asarray(w, dtype=np.float64)
    return np.stack([
        _d1(w[0], h),
        _d2(w[1], h),
        0.5 * (_d2(w[0], h) + _d1(w[1], h)),
    ])


def sym_div(q, h=1.0):
    """Negative adjoint of :func:`sym_grad` under the tensor inner product."""
    _check_h(h)
    q = np.asarray(q, dtype=np.float64)
    return np.stack([
        _b1(q[0], h) + _b2(q[2], h),
        _b1(q[2], h) + _b2(q[1], h),
    ])


def power_iteration(normal_op, x0, iters):
    """Rayleigh-quotient estimate of the top eigenvalue of a PSD operator.

    `normal_op` maps an array to an array of the same shape (``A^T A``).
    Returns the sequence of Rayleigh quotients, one per iteration; for a
    PSD operator it is nondecreasing.
    """
    x = np.array(x0, dtype=np.float64)
    nx = np.sqrt(np.sum(x * x))
    if nx == 0:
        return [0.0] * iters
    x /= nx
    history = []
    for _ in range(iters):
        y = normal_op(x)
        lam = float(np.sum(x * y))
        history.append(max(lam, 0.0))
        ny = np.sqrt(np.sum(y * y))
        if ny == 0:
            history.extend([0.0] * (iters - len(history)))
            break
        x = y / ny
    return history


def opnorm_estimate(shape, h=1.0, iters=100, seed=42):
    """Estimate ``||grad||^2`` on an ``M x N`` grid by power iteration.

    The starting vector is drawn from ``numpy.random.default_rng(seed)``.
    For ``h = 1`` the result never exceeds 8.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    _check_h(h)
    M, N = shape
    x0 = np.random.default_rng(seed).standard_normal((M, N))
    hist = power_iteration(lambda x: -div(grad(x, h), h), x0, iters)
    return hist[-1]


def adjointness_gap(u, p, h=1.0):
    """``<grad u, p> + <u, div p>``; zero up to rounding."""
    return inner(grad(u, h), p) + inner(u, div(p, h))
