"""The over-regularisation weight changes gamma a lot but the final TVpwL result little."""
# %%
import numpy as np

from tvpwl import (
    GammaEstimateParams,
    NoiseSpec,
    add_gaussian_noise,
    estimate_gamma_over_tv,
    generate_synthetic,
    psnr,
    solve_tvpwl,
    ssim,
)

u_gt = generate_synthetic((128, 128))
f, delta = add_gaussian_noise(u_gt, NoiseSpec(level=0.10, seed=0))

# %%
for lam in (100, 200, 300, 400, 500):
    gamma, st = estimate_gamma_over_tv(f, GammaEstimateParams(lam=lam), return_stages=True)
    u = solve_tvpwl(f, gamma, delta).final_u
    print(f"lambda {lam:3d}: ROF PSNR {psnr(st['u_hat'], u_gt):5.2f}  "
          f"mean gamma {np.mean(gamma):5.2f}  TVpwL SSIM {ssim(u, u_gt):.4f}  "
          f"PSNR {psnr(u, u_gt):.2f}")
