"""Deterministic piecewise-affine test image.

The scene, in normalised coordinates ``(row, col) in [0, 1]^2``:

* background ramp ``30 + 60 row + 60 col``;
* a square pyramid centred at ``(0.3, 0.3)``, half-width 0.22, rising from
  60 at its rim to 240 at the apex (four triangular facets);
* a roof over the rectangle ``rows [0.5, 0.92] x cols [0.45, 0.95]`` with a
  ridge at ``col = 0.7``, rising from 60 at the eaves to 230 at the ridge.

Every facet is a convex polygon carrying one affine intensity, and the
pyramid and roof both jump away from the background along their rims.
"""
import numpy as np

__all__ = ["generate_synthetic", "synthetic_labels", "synthetic_regions"]


def _pyramid(cr, cc, hw, apex, rim):
    k = (apex - rim) / hw
    tl, tr = (cr - hw, cc - hw), (cr - hw, cc + hw)
    bl, br = (cr + hw, cc - hw), (cr + hw, cc + hw)
    c = (cr, cc)
    return [
        ((tl, tr, c), (apex - k * cr, k, 0.0)),
        ((bl, c, br), (apex + k * cr, -k, 0.0)),
        ((tl, c, bl), (apex - k * cc, 0.0, k)),
        ((tr, br, c), (apex + k * cc, 0.0, -k)),
    ]


def _roof(r0, r1, c0, c1, ridge, top, eaves):
    kl = (top - eaves) / (ridge - c0)
    kr = (top - eaves) / (c1 - ridge)
    return [
        (((r0, c0), (r0, ridge), (r1, ridge), (r1, c0)), (eaves - kl * c0, 0.0, kl)),
        (((r0, ridge), (r0, c1), (r1, c1), (r1, ridge)), (top + kr * ridge, 0.0, -kr)),
    ]


def synthetic_regions():
    """List of ``(polygon, (a, b, c))`` with intensity ``a + b*row + c*col``.

    Later entries paint over earlier ones; the first covers the domain.
    """
    return (
        [(((0, 0), (0, 1), (1, 1), (1, 0)), (30.0, 60.0, 60.0))]
        + _pyramid(0.3, 0.3, 0.22, 240.0, 60.0)
        + _roof(0.5, 0.92, 0.45, 0.95, 0.7, 230.0, 60.0)
    )


def _inside_convex(rr, cc, polygon):
    pts = np.asarray(polygon, dtype=np.float64)
    nxt = np.roll(pts, -1, axis=0)
    cross = np.stack([
        (b[0] - a[0]) * (cc - a[1]) - (b[1] - a[1]) * (rr - a[0])
        for a, b in zip(pts, nxt)
    ])
    return np.all(cross >= 0, axis=0) | np.all(cross <= 0, axis=0)


def _centres(size):
    M, N = size
    if M < 64 or N < 64:
        raise ValueError(f"synthetic image needs at least 64x64 pixels, got {M}x{N}")
    return np.meshgrid((np.arange(M) + 0.5) / M, (np.arange(N) + 0.5) / N, indexing="ij")


def synthetic_labels(size=(256, 256)):
    """Index into :func:`synthetic_regions` of the facet owning each pixel centre."""
    rr, cc = _centres(size)
    labels = np.zeros(rr.shape, dtype=np.int64)
    for k, (poly, _) in enumerate(synthetic_regions()):
        if k:
            labels[_inside_convex(rr, cc, poly)] = k
    return labels


def generate_synthetic(size=(256, 256)):
    """Piecewise-affine grey-scale image of shape `size` with values in [0, 255]."""
    rr, cc = _centres(size)
    labels = synthetic_labels(size)
    u = np.empty(rr.shape)
    for k, (_, (a, b, c)) in enumerate(synthetic_regions()):
        m = labels == k
        u[m] = a + b * rr[m] + c * cc[m]
    return u
