"""Desk-scale property suite behind ``tvpwl check``.

Each check takes the implementation under test as keyword arguments, so a
deliberately broken operator can be passed in to confirm the check catches it.
"""
import time
from dataclasses import dataclass

import numpy as np

from . import diffops, proximal, regularisers
from .gamma import gamma_from_ground_truth
from .grid import inner, norm2_pointwise
from .metrics import NoiseSpec, add_gaussian_noise
from .oracles import golden_section_prox_rstar
from .solvers import SolverParams, check_maximum_principle, solve_tv, solve_tvpwl
from .synthetic import generate_synthetic

__all__ = ["CheckResult", "CHECKS", "run_checks", "format_table"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def check_adjointness(grad=diffops.grad, div=diffops.div, trials=20, seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for shape in [(1, 1), (1, 7), (7, 1), (8, 8), (13, 9)]:
        for _ in range(trials):
            u = rng.standard_normal(shape)
            p = rng.standard_normal((2,) + shape)
            gu = grad(u)
            gap = abs(inner(gu, p) + inner(u, div(p)))
            scale = np.sqrt(inner(gu, gu)) * np.sqrt(inner(p, p)) + 1.0
            worst = max(worst, gap / scale)
    return worst <= 1e-12, f"max relative gap {worst:.2e}"


def check_opnorm(estimate=diffops.opnorm_estimate):
    vals = {s: estimate(s, 1.0, 50) for s in [(1, 1), (5, 9), (32, 32)]}
    ok = all(v <= 8.0 + 1e-9 for v in vals.values()) and vals[(1, 1)] == 0.0
    return ok, ", ".join(f"{s[0]}x{s[1]}: {v:.4f}" for s, v in vals.items())


def check_prox_oracle(prox=proximal.prox_rstar, trials=2000, seed=1):
    rng = np.random.default_rng(seed)
    K = trials
    p = rng.standard_normal((2, 1, K)) * rng.uniform(0, 3, (1, K))
    sigma = 0.7
    gamma = rng.uniform(0, 2, (1, K))
    # force boundary ties on a few entries
    n = np.hypot(p[0], p[1])
    p[:, :, :10] *= (sigma * gamma[:, :10] / n[:, :10])
    p[:, :, 10:20] *= ((1 + sigma * gamma[:, 10:20]) / n[:, 10:20])
    ctx = proximal.ProxContext(sigma=sigma, tau=1.0, gamma=gamma)
    err = float(np.max(np.abs(prox(p, ctx) - golden_section_prox_rstar(p, sigma, gamma))))
    return err <= 1e-8, f"max abs deviation from golden-section oracle {err:.2e}"


def check_formulations(closed=regularisers.tvpwl_closed_form, primal=regularisers.tvpwl_primal,
                       seed=2):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(20):
        shape = tuple(rng.integers(1, 17, size=2))
        u = rng.uniform(0, 255, shape)
        gamma = rng.uniform(0, 60, shape)
        a, b = closed(u, gamma), primal(u, gamma)
        worst = max(worst, abs(a - b) / (1 + abs(a)))
    return worst <= 1e-12, f"max relative difference {worst:.2e}"


def check_dual_bound(seed=3):
    rng = np.random.default_rng(seed)
    worst = -np.inf
    for _ in range(10):
        u = rng.uniform(0, 255, (9, 11))
        gamma = rng.uniform(0, 40, u.shape)
        value = regularisers.tvpwl_closed_form(u, gamma)
        for _ in range(20):
            phi = proximal.project_unit_ball(rng.standard_normal((2,) + u.shape) * 2, 1.0)
            phi /= np.maximum(1.0, norm2_pointwise(phi))  # absorb rounding
            worst = max(worst, regularisers.tvpwl_dual_value(u, gamma, phi) - value)
    return worst <= 1e-9, f"max (dual - closed form) {worst:.3e}"


def check_sandwich(seed=4):
    rng = np.random.default_rng(seed)
    for _ in range(20):
        u = rng.uniform(0, 255, (10, 10))
        gamma = rng.uniform(0, 50, u.shape)
        try:
            regularisers.sandwich_check(u, gamma)
        except AssertionError as exc:
            return False, str(exc)
    return True, "TV - sum(gamma) <= TVpwL <= TV on 20 instances"


def check_solver_properties(size=64):
    u = generate_synthetic((size, size))
    f, delta = add_gaussian_noise(u, NoiseSpec(0.1, seed=7))
    params = SolverParams(tol=1e-3, max_iter=20_000, record_history=False)
    reports = [solve_tv(f, delta, params), solve_tvpwl(f, gamma_from_ground_truth(u), delta, params)]
    msgs, ok = [], True
    for rep in reports:
        feas = np.linalg.norm(rep.final_u - f) <= delta * (1 + 1e-9)
        maxp = check_maximum_principle(rep.final_u, f)
        ok &= rep.converged and feas and maxp
        msgs.append(f"{rep.method}: {rep.iterations} it, feasible={feas}, max-principle={maxp}")
    return ok, "; ".join(msgs)


CHECKS = {
    "adjointness": check_adjointness,
    "opnorm<=8": check_opnorm,
    "prox-oracle": check_prox_oracle,
    "formulation-equivalence": check_formulations,
    "dual-lower-bound": check_dual_bound,
    "sandwich": check_sandwich,
    "solver-feasibility+max-principle": check_solver_properties,
}


def run_checks(checks=None):
    results = []
    for name, fn in (checks or CHECKS).items():
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(ok), detail, time.perf_counter() - t0))
    return results


def format_table(results):
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  result  time(s)  detail"]
    for r in results:
        lines.append(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL':<6}  {r.seconds:7.2f}  {r.detail}")
    return "\n".join(lines)
