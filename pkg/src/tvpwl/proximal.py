"""Closed-form proximal maps for the PDHG solvers."""
from dataclasses import dataclass

import numpy as np

from .grid import frobenius_pointwise, norm2_pointwise

__all__ = [
    "ProxContext",
    "prox_rstar",
    "prox_rstar_scale",
    "prox_f",
    "project_unit_ball",
    "project_tensor_ball",
]


@dataclass
class ProxContext:
    """Step sizes and data entering the proximal maps.

    Attributes
    ----------
    sigma, tau : float
        Dual and primal step sizes.
    gamma : ndarray or None
        Per-pixel Lipschitz budget, nonnegative.
    delta : float
        Radius of the fidelity ball around `f`.
    f : ndarray or None
        Noisy data.
    """

    sigma: float = 1.0
    tau: float = 1.0
    gamma: np.ndarray = None
    delta: float = 0.0
    f: np.ndarray = None

    def __post_init__(self):
        if not (self.sigma > 0 and self.tau > 0):
            raise ValueError("sigma and tau must be positive")
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")
        if self.gamma is not None:
            self.gamma = np.asarray(self.gamma, dtype=np.float64)
            if np.any(self.gamma < 0):
                raise ValueError("gamma must be nonnegative")


def prox_rstar_scale(n, sigma_gamma):
    """Per-pixel scale ``alpha`` such that ``prox = alpha * p_diamond``.

    ``alpha = 0`` where ``n <= sigma*gamma``, ``1/n`` where
    ``n >= 1 + sigma*gamma``, and ``1 - sigma*gamma/n`` in between.
    """
    n = np.asarray(n, dtype=np.float64)
    # shrink by sigma*gamma, clip to the unit ball: one expression for all three cases
    shrunk = np.clip(n - sigma_gamma, 0.0, 1.0)
    return np.divide(shrunk, n, out=np.zeros_like(n), where=n > 0)


def prox_rstar(p_diamond, ctx):
    """Proximal map of ``sigma * R*`` for the piecewise-Lipschitz TV dual term.

    Shrinks each dual vector towards zero by ``sigma*gamma`` and then clips it
    to the unit ball. With ``gamma = 0`` this is the unit-ball projection.
    """
    p = np.asarray(p_diamond, dtype=np.float64)
    if ctx.gamma is None or ctx.gamma.shape != p.shape[1:]:
        raise ValueError("gamma must match the dual variable's grid")
    n = norm2_pointwise(p)
    return prox_rstar_scale(n, ctx.sigma * ctx.gamma) * p


def prox_f(u_diamond, ctx):
    """Projection onto the ball ``||u - f||_2 <= delta``."""
    u = np.asarray(u_diamond, dtype=np.float64)
    f = ctx.f
    if f is None or f.shape != u.shape:
        raise ValueError("f must match the primal variable's shape")
    return _project_l2_ball(u, f, ctx.delta)


def _project_l2_ball(u, f, delta):
    d = u - f
    nd = np.sqrt(np.sum(d * d))
    if nd <= delta:
        return u.copy()
    return f + d * (delta / nd)


def project_unit_ball(p, radius=1.0):
    """Pointwise radial projection of a vector field onto ``|p(x)| <= radius``."""
    if not radius > 0:
        raise ValueError("radius must be positive")
    p = np.asarray(p, dtype=np.float64)
    n = norm2_pointwise(p)
    return p / np.maximum(1.0, n / radius)


def project_tensor_ball(q, radius=1.0):
    """Pointwise projection of a symmetric tensor field onto the Frobenius ball."""
    if not radius > 0:
        raise ValueError("radius must be positive")
    q = np.asarray(q, dtype=np.float64)
    n = frobenius_pointwise(q)
    return q / np.maximum(1.0, n / radius)
