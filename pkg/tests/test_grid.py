import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tvpwl.grid import (
    as_scalar,
    as_tensor,
    as_vector,
    field_kind,
    frobenius_pointwise,
    inner,
    l2_norm,
    norm2_pointwise,
)
from tvpwl.oracles import inner_loops

# squares of tiny entries underflow, which no norm can represent
finite = st.floats(-1e3, 1e3).filter(lambda x: x == 0 or abs(x) > 1e-100)


def test_norm2_zero_field():
    assert np.all(norm2_pointwise(np.zeros((2, 3, 4))) == 0)


def test_norm2_pythagorean_pixel():
    v = np.array([3.0, 4.0]).reshape(2, 1, 1)
    assert norm2_pointwise(v)[0, 0] == 5.0


def test_norm2_matches_elementwise(rng):
    v = rng.standard_normal((2, 4, 4))
    expected = [[math.sqrt(v[0, i, j] ** 2 + v[1, i, j] ** 2) for j in range(4)] for i in range(4)]
    np.testing.assert_allclose(norm2_pointwise(v), expected, rtol=1e-15)


def test_frobenius_counts_offdiagonal_twice():
    q = np.array([1.0, 2.0, 2.0]).reshape(3, 1, 1)
    assert frobenius_pointwise(q)[0, 0] == pytest.approx(math.sqrt(1 + 4 + 2 * 4))


def test_inner_one_hot():
    a = np.zeros((3, 3))
    a[1, 2] = 1.0
    assert inner(a, a) == 1.0


def test_inner_with_zero(rng):
    a = rng.standard_normal((3, 5))
    assert inner(a, np.zeros_like(a)) == 0.0


def test_inner_matches_double_loop(rng):
    a, b = rng.standard_normal((2, 3, 5))
    assert inner(a, b) == pytest.approx(inner_loops(a, b), rel=1e-14, abs=1e-14)


def test_inner_tensor_weights():
    a = np.ones((3, 2, 2))
    # planes q11, q22, q12 with q12 weighted twice: 4 * (1 + 1 + 2)
    assert inner(a, a) == 16.0


def test_inner_shape_mismatch():
    with pytest.raises(ValueError):
        inner(np.zeros((2, 2)), np.zeros((2, 3)))


def test_l2_norm_cases(rng):
    assert l2_norm(np.zeros((4, 4))) == 0.0
    assert l2_norm(np.array([[3.0, 4.0]])) == 5.0
    a = rng.standard_normal((6, 7))
    assert l2_norm(a) == pytest.approx(math.sqrt(inner_loops(a, a)), rel=1e-14)


def test_field_kinds():
    assert field_kind(np.zeros((4, 5))) == "scalar"
    assert field_kind(np.zeros((2, 4, 5))) == "vector"
    assert field_kind(np.zeros((3, 4, 5))) == "tensor"


def test_constructors_validate():
    with pytest.raises(ValueError):
        as_scalar(np.zeros(3))
    with pytest.raises(ValueError):
        as_vector(np.zeros((3, 2, 2)))
    with pytest.raises(ValueError):
        as_tensor(np.zeros((2, 2, 2)))
    with pytest.raises(ValueError):
        as_scalar(np.array([[np.nan]]))


@given(arrays(np.float64, (3, 4), elements=finite), arrays(np.float64, (3, 4), elements=finite))
def test_inner_symmetric_and_cauchy_schwarz(a, b):
    assert inner(a, b) == inner(b, a)
    assert abs(inner(a, b)) <= l2_norm(a) * l2_norm(b) * (1 + 1e-12) + 1e-300
