"""Discrete gradient, divergence and the norm of the gradient."""
# %%
import numpy as np

from tvpwl import div, grad, inner, opnorm_estimate

rng = np.random.default_rng(0)

# %% [markdown]
# Forward differences with a zero last row (first component) and a zero last
# column (second component). On a ramp the gradient is constant inside.

# %%
i, j = np.mgrid[0:4, 0:5].astype(float)
g = grad(2 * i + 3 * j)
print("d/di of ramp:\n", g[0])
print("d/dj of ramp:\n", g[1])

# %% [markdown]
# div is built as the negative transpose of grad, so <grad u, p> = -<u, div p>
# holds to rounding on every grid, including degenerate 1xN ones.

# %%
for shape in [(1, 1), (1, 7), (33, 47)]:
    u = rng.standard_normal(shape)
    p = rng.standard_normal((2,) + shape)
    print(shape, "adjointness gap:", inner(grad(u), p) + inner(u, div(p)))

# %% [markdown]
# Power iteration on -div grad estimates ||grad||^2; it approaches 8 from below
# as the grid grows. The step sizes sigma = tau = 0.99/sqrt(8) rely on this.

# %%
for n in (8, 32, 128, 256):
    print(f"{n:4d}x{n:<4d} ||grad||^2 ~ {opnorm_estimate((n, n)):.5f}")
