"""Primal-dual hybrid gradient solvers for

    min_u J(u)   subject to   ||u - f||_2 <= delta

with ``J`` the piecewise-Lipschitz TV, plain TV, or second-order TGV.

All three share the iteration skeleton: dual prox step on ``p + sigma K ubar``,
primal projection onto the fidelity ball, over-relaxation with ``theta``, and
the normalised iterate-difference residual as the exit test.
"""
import math
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from .diffops import div, grad, power_iteration, sym_div, sym_grad
from .grid import as_scalar
from .proximal import (
    ProxContext,
    project_tensor_ball,
    project_unit_ball,
    prox_rstar,
)

__all__ = [
    "GRAD_NORM_SQ",
    "SolverParams",
    "SolveReport",
    "TgvParams",
    "residual",
    "solve_tvpwl",
    "solve_tv",
    "solve_tgv2",
    "tgv_opnorm_sq",
]

# bound on ||grad||^2 for unit spacing
GRAD_NORM_SQ = 8.0
_DEFAULT_STEP = 0.99 / math.sqrt(GRAD_NORM_SQ)


@dataclass
class SolverParams:
    sigma: float = _DEFAULT_STEP
    tau: float = _DEFAULT_STEP
    theta: float = 1.0
    tol: float = 1e-3
    max_iter: int = 100_000
    record_history: bool = True

    def validate(self, opnorm_sq=GRAD_NORM_SQ):
        if not (self.sigma > 0 and self.tau > 0):
            raise ValueError("sigma and tau must be positive")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must lie in [0, 1]")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if int(self.max_iter) < 1:
            raise ValueError("max_iter must be a positive integer")
        if self.sigma * self.tau * opnorm_sq >= 1.0:
            raise ValueError(
                f"step sizes violate sigma*tau*L^2 < 1 "
                f"({self.sigma}*{self.tau}*{opnorm_sq} = {self.sigma * self.tau * opnorm_sq})"
            )
        return self


@dataclass
class TgvParams:
    beta: float = 1.25
    opnorm_iters: int = 100
    safety: float = 1.01

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")


@dataclass
class SolveReport:
    """Outcome of one solver run.

    ``residual_history`` and ``gap_history`` hold one entry per iteration
    (empty when history recording is off); the gap is
    ``delta - ||u^k - f||_2``. ``final_u`` is the iterate with the smallest
    residual seen, which is the last one whenever the run converged.
    """

    iterations: int
    residual_history: list
    gap_history: list
    wall_time: float
    final_u: np.ndarray
    converged: bool
    final_residual: float = float("nan")
    method: str = ""
    params: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def summary(self):
        """JSON-friendly dict without the image and histories."""
        return {
            "method": self.method,
            "iterations": self.iterations,
            "converged": self.converged,
            "final_residual": self.final_residual,
            "wall_time_s": self.wall_time,
            "params": dict(self.params),
        }


def residual(uk, uk1, pk, pk1, ubar_k1, sigma, tau):
    """Normalised primal-dual residual between consecutive iterates.

    ::

        1/(MN) * ( sum |(u^k - u^{k+1} + tau div(p^k - p^{k+1})) / tau|
                 + sum |(p^k - p^{k+1} - sigma grad(u^k - ubar^{k+1})) / sigma| )

    The absolute values are taken entrywise; the second sum runs over both
    components of the dual field.
    """
    uk = np.asarray(uk, dtype=np.float64)
    M, N = uk.shape
    dp = np.asarray(pk) - np.asarray(pk1)
    primal = (uk - uk1 + tau * div(dp)) / tau
    dual = (dp - sigma * grad(uk - ubar_k1)) / sigma
    return (np.sum(np.abs(primal)) + np.sum(np.abs(dual))) / (M * N)


def _fidelity_projector(f, delta):
    def project(u):
        d = u - f
        nd = math.sqrt(np.sum(d * d))
        if nd <= delta:
            return u, delta - nd
        out = f + d * (delta / nd)
        d = out - f
        return out, delta - math.sqrt(np.sum(d * d))
    return project


def _check_problem(f, delta):
    f = as_scalar(f, "f")
    if not (delta >= 0 and math.isfinite(delta)):
        raise ValueError("delta must be finite and nonnegative")
    return f, float(delta)


def _first_order_pdhg(f, delta, params, dual_prox, method, extra_params):
    params.validate()
    sigma, tau, theta = params.sigma, params.tau, params.theta
    MN = f.size
    project = _fidelity_projector(f, delta)

    t0 = time.perf_counter()
    u = f.copy()
    ubar = f.copy()
    p = grad(u)
    div_p = div(p)
    res_hist, gap_hist = [], []
    best_u, best_res = u, math.inf
    converged = False
    res = math.inf
    k = 0
    for k in range(1, int(params.max_iter) + 1):
        p_new = dual_prox(p + sigma * grad(ubar))
        div_p_new = div(p_new)
        u_new, gap = project(u + tau * div_p_new)
        ubar = u_new + theta * (u_new - u)

        # residual, reusing div(p_new) by linearity
        dp = p - p_new
        primal = (u - u_new) / tau + (div_p - div_p_new)
        dual = dp / sigma - grad(u - ubar)
        res = (np.sum(np.abs(primal)) + np.sum(np.abs(dual))) / MN

        if params.record_history:
            res_hist.append(float(res))
            gap_hist.append(float(gap))
        u, p, div_p = u_new, p_new, div_p_new
        if res < best_res:
            best_res, best_u = res, u
        if res <= params.tol:
            converged = True
            break
    wall = time.perf_counter() - t0
    final_u = u if converged else best_u
    final_res = float(res if converged else best_res)
    return SolveReport(
        iterations=k,
        residual_history=res_hist,
        gap_history=gap_hist,
        wall_time=wall,
        final_u=final_u,
        converged=converged,
        final_residual=final_res,
        method=method,
        params={**asdict(params), "delta": delta, **extra_params},
        extras={"p": p},
    )


def solve_tvpwl(f, gamma, delta, params=None):
    """Denoise `f` with the piecewise-Lipschitz TV under ``||u - f|| <= delta``.

    Parameters
    ----------
    f : ndarray, shape (M, N)
        Noisy image.
    gamma : ndarray, shape (M, N) or float
        Nonnegative Lipschitz budget per pixel.
    delta : float
        Fidelity radius.
    params : SolverParams, optional

    Returns
    -------
    SolveReport
    """
    f, delta = _check_problem(f, delta)
    params = params or SolverParams()
    gamma = np.asarray(gamma, dtype=np.float64)
    if gamma.ndim == 0:
        gamma = np.full(f.shape, float(gamma))
    if gamma.shape != f.shape:
        raise ValueError(f"gamma shape {gamma.shape} does not match f {f.shape}")
    ctx = ProxContext(sigma=params.sigma, tau=params.tau, gamma=gamma, delta=delta, f=f)
    return _first_order_pdhg(
        f, delta, params, lambda q: prox_rstar(q, ctx), "tvpwl", {}
    )


def solve_tv(f, delta, params=None):
    """Denoise `f` with isotropic TV under ``||u - f|| <= delta``."""
    f, delta = _check_problem(f, delta)
    params = params or SolverParams()
    return _first_order_pdhg(
        f, delta, params, lambda q: project_unit_ball(q, 1.0), "tv", {}
    )


def _tgv_forward(u, w):
    return grad(u) - w, sym_grad(w)


def _tgv_adjoint(p, q):
    return -div(p), -p - sym_div(q)


def tgv_opnorm_sq(shape, iters=100, seed=42):
    """Power-iteration estimate of ``||K||^2`` for ``K(u, w) = (grad u - w, E w)``."""
    M, N = shape
    size = M * N

    def normal(x):
        u = x[:size].reshape(M, N)
        w = x[size:].reshape(2, M, N)
        au, aw = _tgv_adjoint(*_tgv_forward(u, w))
        return np.concatenate([au.ravel(), aw.ravel()])

    x0 = np.random.default_rng(seed).standard_normal(3 * size)
    return power_iteration(normal, x0, iters)[-1]


def solve_tgv2(f, delta, tgv=None, params=None):
    """Denoise `f` with second-order TGV, ``min ||grad u - w|| + beta ||E w||``.

    The step sizes in `params` are for ``||grad||^2 = 8``; they are rescaled
    by ``sqrt(8 / L^2)`` where ``L^2`` is a power-iteration estimate of the
    stacked operator norm times ``tgv.safety``.
    """
    f, delta = _check_problem(f, delta)
    params = params or SolverParams()
    tgv = tgv or TgvParams()
    params.validate()
    lsq = tgv_opnorm_sq(f.shape, tgv.opnorm_iters) * tgv.safety
    scale = math.sqrt(GRAD_NORM_SQ / lsq) if lsq > 0 else 1.0
    sigma, tau, theta, beta = params.sigma * scale, params.tau * scale, params.theta, tgv.beta
    MN = f.size
    project = _fidelity_projector(f, delta)

    t0 = time.perf_counter()
    u = f.copy()
    ubar = f.copy()
    w = np.zeros((2,) + f.shape)
    wbar = w.copy()
    p, q = _tgv_forward(u, w)
    ku_adj, kw_adj = _tgv_adjoint(p, q)
    res_hist, gap_hist = [], []
    best_u, best_res = u, math.inf
    converged = False
    res = math.inf
    k = 0
    for k in range(1, int(params.max_iter) + 1):
        kp, kq = _tgv_forward(ubar, wbar)
        p_new = project_unit_ball(p + sigma * kp, 1.0)
        q_new = project_tensor_ball(q + sigma * kq, beta)
        au_new, aw_new = _tgv_adjoint(p_new, q_new)
        u_new, gap = project(u - tau * au_new)
        w_new = w - tau * aw_new
        ubar = u_new + theta * (u_new - u)
        wbar = w_new + theta * (w_new - w)

        ru = (u - u_new) / tau - (ku_adj - au_new)
        rw = (w - w_new) / tau - (kw_adj - aw_new)
        dkp, dkq = _tgv_forward(u - ubar, w - wbar)
        rp = (p - p_new) / sigma - dkp
        rq = (q - q_new) / sigma - dkq
        res = (
            np.sum(np.abs(ru)) + np.sum(np.abs(rw))
            + np.sum(np.abs(rp)) + np.sum(np.abs(rq))
        ) / MN

        if params.record_history:
            res_hist.append(float(res))
            gap_hist.append(float(gap))
        u, w, p, q = u_new, w_new, p_new, q_new
        ku_adj, kw_adj = au_new, aw_new
        if res < best_res:
            best_res, best_u = res, u
        if res <= params.tol:
            converged = True
            break
    wall = time.perf_counter() - t0
    return SolveReport(
        iterations=k,
        residual_history=res_hist,
        gap_history=gap_hist,
        wall_time=wall,
        final_u=u if converged else best_u,
        converged=converged,
        final_residual=float(res if converged else best_res),
        method="tgv",
        params={
            **asdict(params),
            "delta": delta,
            "beta": beta,
            "opnorm_sq": lsq,
            "effective_sigma": sigma,
            "effective_tau": tau,
        },
        extras={"w": w, "p": p, "q": q},
    )


def check_maximum_principle(u, f, rel=1e-6):
    """True if ``min f - eps <= u <= max f + eps`` with ``eps = rel * range(f)``."""
    lo, hi = float(np.min(f)), float(np.max(f))
    eps = rel * (hi - lo)
    return bool(np.min(u) >= lo - eps and np.max(u) <= hi + eps)
