import math

import numpy as np
import pytest

from tvpwl.diffops import grad, sym_grad
from tvpwl.gamma import gamma_from_ground_truth
from tvpwl.grid import frobenius_pointwise, l2_norm, norm2_pointwise
from tvpwl.metrics import NoiseSpec, add_gaussian_noise
from tvpwl.regularisers import tv, tvpwl_closed_form
from tvpwl.solvers import (
    SolverParams,
    TgvParams,
    check_maximum_principle,
    residual,
    solve_tgv2,
    solve_tv,
    solve_tvpwl,
    tgv_opnorm_sq,
)
from tvpwl.synthetic import generate_synthetic


@pytest.fixture(scope="module")
def noisy64():
    u = generate_synthetic((64, 64))
    f, delta = add_gaussian_noise(u, NoiseSpec(level=0.1, seed=7))
    return u, f, delta


def _rms(a, b):
    return math.sqrt(np.mean((a - b) ** 2))


def test_residual_fixed_point_is_zero(rng):
    u = rng.standard_normal((4, 5))
    p = rng.standard_normal((2, 4, 5))
    assert residual(u, u, p, p, u, 0.3, 0.3) == 0.0


def test_residual_hand_example():
    uk = np.array([[1.0, 2.0]])
    uk1 = np.zeros((1, 2))
    pk = np.zeros((2, 1, 2))
    pk1 = np.zeros((2, 1, 2))
    pk1[1, 0, 0] = 1.0
    ubar = np.array([[3.0, 3.0]])
    # primal part |[1, 5]| = 6, dual part |[-5, 0]| = 5, over MN = 2
    assert residual(uk, uk1, pk, pk1, ubar, sigma=0.25, tau=0.5) == pytest.approx(5.5, abs=1e-15)


def test_params_validation():
    SolverParams().validate()
    with pytest.raises(ValueError):
        SolverParams(sigma=0.5, tau=0.5).validate()
    with pytest.raises(ValueError):
        SolverParams(theta=1.5).validate()
    with pytest.raises(ValueError):
        SolverParams(tol=0).validate()
    with pytest.raises(ValueError):
        TgvParams(beta=0)


def test_bad_problem_rejected():
    with pytest.raises(ValueError):
        solve_tv(np.zeros((3, 3)), -1.0)
    with pytest.raises(ValueError):
        solve_tvpwl(np.zeros((3, 3)), np.zeros((2, 2)), 1.0)


def test_tvpwl_kernel_fixed_point(noisy64):
    _, f, _ = noisy64
    gamma = 10 * (norm2_pointwise(grad(f)) + 1)
    rep = solve_tvpwl(f, gamma, delta=1e6)
    assert rep.converged
    assert np.array_equal(rep.final_u, f)


def test_tv_zero_radius_returns_f(noisy64):
    _, f, _ = noisy64
    rep = solve_tv(f, 0.0, SolverParams(max_iter=50))
    assert np.array_equal(rep.final_u, f)


def test_tv_constant_input():
    f = np.full((16, 16), 42.0)
    rep = solve_tv(f, 5.0)
    assert rep.converged
    assert np.array_equal(rep.final_u, f)


def test_tgv_noiseless_affine_zero_radius():
    f = generate_synthetic((64, 64))
    rep = solve_tgv2(f, 0.0, params=SolverParams(max_iter=20))
    assert np.array_equal(rep.final_u, f)


def test_zero_budget_matches_tv(noisy64):
    _, f, delta = noisy64
    params = SolverParams(tol=1e-5)
    a = solve_tvpwl(f, 0.0, delta, params)
    b = solve_tv(f, delta, params)
    assert a.converged and b.converged
    assert _rms(a.final_u, b.final_u) <= 1e-6


def test_large_beta_pins_w_to_kernel_of_e(noisy64):
    # ker E holds the rigid motions, so w is driven into that kernel, not to 0
    _, f, delta = noisy64
    rep = solve_tgv2(f, delta, TgvParams(beta=1e6), SolverParams(tol=1e-3))
    w = rep.extras["w"]
    assert np.sum(frobenius_pointwise(sym_grad(w))) <= 1e-3 * np.sum(norm2_pointwise(w))
    i, j = np.mgrid[0:64, 0:64]
    # least-squares fit w = (a + c j, b - c i)
    A = np.zeros((2 * w[0].size, 3))
    A[: w[0].size, 0] = 1
    A[: w[0].size, 2] = j.ravel()
    A[w[0].size:, 1] = 1
    A[w[0].size:, 2] = -i.ravel()
    coef, *_ = np.linalg.lstsq(A, w.reshape(-1), rcond=None)
    assert np.max(np.abs(A @ coef - w.reshape(-1))) < 0.05
    assert np.hypot(coef[0], coef[1]) > 0.5


def test_tgv_opnorm_estimate():
    lsq = tgv_opnorm_sq((32, 32))
    # ||K||^2 <= ||grad||^2 + 1 + ||E||^2 + 2 stays well below 13
    assert 8.0 < lsq < 13.0


@pytest.mark.parametrize("solver", ["tv", "tvpwl", "tgv"])
def test_converged_runs_feasible_with_valid_histories(noisy64, solver):
    u, f, delta = noisy64
    if solver == "tv":
        rep = solve_tv(f, delta)
    elif solver == "tvpwl":
        rep = solve_tvpwl(f, gamma_from_ground_truth(u), delta)
    else:
        rep = solve_tgv2(f, delta)
    assert rep.converged and rep.final_residual <= 1e-3
    assert l2_norm(rep.final_u - f) <= delta * (1 + 1e-9)
    assert len(rep.residual_history) == rep.iterations == len(rep.gap_history)
    assert all(math.isfinite(r) and r >= 0 for r in rep.residual_history)
    assert min(rep.gap_history) >= -1e-9
    if solver != "tgv":
        assert check_maximum_principle(rep.final_u, f)


def test_tvpwl_decreases_objective(noisy64):
    u, f, delta = noisy64
    gamma = gamma_from_ground_truth(u)
    rep = solve_tvpwl(f, gamma, delta)
    assert tvpwl_closed_form(rep.final_u, gamma) < tvpwl_closed_form(f, gamma)
    assert tv(solve_tv(f, delta).final_u) < tv(f)


def test_nonconvergence_returns_best_iterate(noisy64):
    _, f, delta = noisy64
    rep = solve_tv(f, delta, SolverParams(max_iter=5))
    assert not rep.converged
    assert rep.iterations == 5
    assert rep.final_residual == min(rep.residual_history)
    assert rep.summary()["converged"] is False


def test_history_can_be_disabled(noisy64):
    _, f, delta = noisy64
    rep = solve_tv(f, delta, SolverParams(record_history=False))
    assert rep.residual_history == [] and rep.converged


def test_deterministic(noisy64):
    _, f, delta = noisy64
    a = solve_tv(f, delta).final_u
    b = solve_tv(f, delta).final_u
    assert np.array_equal(a, b)


def test_maximum_principle_helper():
    f = np.array([[0.0, 10.0]])
    assert check_maximum_principle(np.array([[0.0, 10.0 + 1e-6]]), f)
    assert not check_maximum_principle(np.array([[-1e-4, 5.0]]), f)
