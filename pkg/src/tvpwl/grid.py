"""Dense 2-D fields and the elementwise algebra shared by the numerical modules.

Fields are plain ``float64`` numpy arrays:

* scalar field   -- shape ``(M, N)``
* vector field   -- shape ``(2, M, N)``, planes ``(p1, p2)``
* tensor field   -- shape ``(3, M, N)``, planes ``(q11, q22, q12)`` of a
  symmetric 2x2 tensor per pixel

Indexing is ``(row, col)`` in C (row-major) order.
"""
import math

import numpy as np

__all__ = [
    "as_scalar",
    "as_vector",
    "as_tensor",
    "field_kind",
    "norm2_pointwise",
    "frobenius_pointwise",
    "inner",
    "l2_norm",
]


def as_scalar(a, name="field"):
    """Return `a` as a C-contiguous float64 ``(M, N)`` array, validating it."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite values")
    return a


def as_vector(p, name="vector field"):
    p = np.ascontiguousarray(p, dtype=np.float64)
    if p.ndim != 3 or p.shape[0] != 2:
        raise ValueError(f"{name} must have shape (2, M, N), got {p.shape}")
    return p


def as_tensor(q, name="tensor field"):
    q = np.ascontiguousarray(q, dtype=np.float64)
    if q.ndim != 3 or q.shape[0] != 3:
        raise ValueError(f"{name} must have shape (3, M, N), got {q.shape}")
    return q


def field_kind(a):
    """Classify an array as ``"scalar"``, ``"vector"`` or ``"tensor"``."""
    if a.ndim == 2:
        return "scalar"
    if a.ndim == 3 and a.shape[0] == 2:
        return "vector"
    if a.ndim == 3 and a.shape[0] == 3:
        return "tensor"
    raise ValueError(f"not a field: shape {a.shape}")


def norm2_pointwise(v):
    """Pointwise Euclidean norm ``sqrt(p1**2 + p2**2)`` of a vector field."""
    v = np.asarray(v, dtype=np.float64)
    return np.sqrt(v[0] * v[0] + v[1] * v[1])


def frobenius_pointwise(q):
    """Pointwise Frobenius norm of a symmetric tensor field (off-diagonal counted twice)."""
    q = np.asarray(q, dtype=np.float64)
    return np.sqrt(q[0] * q[0] + q[1] * q[1] + 2.0 * q[2] * q[2])


def _weights(kind):
    return (1.0, 1.0, 2.0) if kind == "tensor" else None


def inner(a, b):
    """Euclidean inner product of two fields of the same kind and shape.

    For tensor fields the off-diagonal plane enters twice, so that
    ``inner(q, q) == sum(frobenius_pointwise(q)**2)``.

    The sum is accumulated with :func:`math.fsum`, i.e. correctly rounded and
    therefore independent of traversal order.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    kind = field_kind(a)
    prod = a * b
    if kind == "tensor":
        prod[2] *= 2.0
    return math.fsum(prod.ravel())


def l2_norm(a):
    """``sqrt(sum(a**2))`` over all entries of a scalar field."""
    a = np.asarray(a, dtype=np.float64)
    return math.sqrt(math.fsum((a * a).ravel()))
