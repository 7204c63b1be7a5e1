import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tvpwl.diffops import (
    adjointness_gap,
    div,
    grad,
    opnorm_estimate,
    power_iteration,
    sym_div,
    sym_grad,
)
from tvpwl.grid import inner, l2_norm
from tvpwl.oracles import div_loops, grad_loops

shapes = st.tuples(st.integers(1, 9), st.integers(1, 9))
vals = st.floats(-100, 100, allow_nan=False)


def test_grad_constant_is_zero():
    assert np.all(grad(np.full((4, 6), 3.7)) == 0)


def test_grad_hand_example():
    g = grad(np.array([[0.0, 1.0], [2.0, 3.0]]))
    np.testing.assert_array_equal(g[0], [[2, 2], [0, 0]])
    np.testing.assert_array_equal(g[1], [[1, 0], [1, 0]])


@pytest.mark.parametrize("h", [1.0, 0.5])
def test_grad_div_match_loop_oracles(rng, h):
    u = rng.standard_normal((5, 7))
    p = rng.standard_normal((2, 5, 7))
    np.testing.assert_allclose(grad(u, h), grad_loops(u, h), rtol=0, atol=1e-13)
    np.testing.assert_allclose(div(p, h), div_loops(p, h), rtol=0, atol=1e-13)


def test_div_zero():
    assert np.all(div(np.zeros((2, 3, 3))) == 0)


def test_div_interior_one_hot():
    p = np.zeros((2, 5, 5))
    p[0, 2, 3] = 1.0
    d = div(p, h=0.5)
    expected = np.zeros((5, 5))
    expected[2, 3] = 2.0
    expected[3, 3] = -2.0
    np.testing.assert_array_equal(d, expected)


def test_div_is_negative_adjoint_on_basis():
    # column-by-column: div = -grad^T exactly on the one-hot basis
    M, N = 3, 4
    for k in range(2 * M * N):
        p = np.zeros(2 * M * N)
        p[k] = 1.0
        p = p.reshape(2, M, N)
        for m in range(M * N):
            u = np.zeros(M * N)
            u[m] = 1.0
            u = u.reshape(M, N)
            assert inner(grad(u), p) == -inner(u, div(p))


@pytest.mark.parametrize("shape", [(1, 1), (1, 7), (7, 1), (32, 32), (33, 47)])
def test_adjointness_random(rng, shape):
    for _ in range(10):
        u = rng.standard_normal(shape)
        p = rng.standard_normal((2,) + shape)
        scale = l2_norm(u) * np.sqrt(inner(p, p)) + 1
        assert abs(adjointness_gap(u, p)) <= 1e-12 * scale


@given(shapes.flatmap(lambda s: st.tuples(arrays(np.float64, s, elements=vals),
                                          arrays(np.float64, (2,) + s, elements=vals))))
def test_adjointness_property(up):
    u, p = up
    scale = l2_norm(u) * np.sqrt(inner(p, p)) + 1
    assert abs(adjointness_gap(u, p)) <= 1e-12 * scale


def test_bad_spacing():
    with pytest.raises(ValueError):
        grad(np.zeros((2, 2)), h=0.0)


def test_opnorm_degenerate_grid():
    assert opnorm_estimate((1, 1)) == 0.0


def test_opnorm_256():
    v = opnorm_estimate((256, 256))
    assert 7.9 < v <= 8.0


@given(shapes)
def test_opnorm_bounded_by_eight(shape):
    assert opnorm_estimate(shape, iters=30) <= 8.0 + 1e-12


def test_power_iteration_monotone(rng):
    A = rng.standard_normal((6, 6))
    hist = power_iteration(lambda x: A.T @ (A @ x), rng.standard_normal(6), 40)
    assert all(b >= a - 1e-12 for a, b in zip(hist, hist[1:]))
    assert hist[-1] == pytest.approx(np.linalg.norm(A, 2) ** 2, rel=1e-6)


def test_sym_grad_constant_is_zero():
    assert np.all(sym_grad(np.full((2, 5, 5), 2.0)) == 0)


def test_sym_grad_of_ramp_gradient_vanishes_inside():
    i, j = np.mgrid[0:9, 0:11].astype(float)
    E = sym_grad(grad(3 * i - 2 * j + 1))
    assert np.all(E[:, :-2, :-2] == 0)


def test_sym_grad_hand_values():
    w = np.zeros((2, 2, 2))
    w[0] = [[0, 1], [2, 3]]
    E = sym_grad(w)
    np.testing.assert_array_equal(E[0], [[2, 2], [0, 0]])
    np.testing.assert_array_equal(E[1], 0)
    np.testing.assert_array_equal(E[2], [[0.5, 0], [0.5, 0]])


@pytest.mark.parametrize("shape", [(1, 1), (1, 5), (6, 1), (9, 13)])
def test_sym_adjointness(rng, shape):
    for _ in range(10):
        w = rng.standard_normal((2,) + shape)
        q = rng.standard_normal((3,) + shape)
        gap = inner(sym_grad(w), q) + inner(w, sym_div(q))
        assert abs(gap) <= 1e-12 * (np.sqrt(inner(w, w) * inner(q, q)) + 1)
