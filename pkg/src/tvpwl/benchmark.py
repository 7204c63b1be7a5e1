"""Benchmark harness: noise synthesis, gamma estimation, the four solvers,
and SSIM/PSNR scoring, written out as CSV."""
import csv
import io
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .gamma import GammaEstimateParams, estimate_gamma_over_tv, gamma_from_ground_truth
from .imageio import _atomic_write, read_image
from .metrics import NoiseSpec, add_gaussian_noise, psnr, ssim
from .solvers import SolverParams, TgvParams, solve_tgv2, solve_tv, solve_tvpwl

__all__ = [
    "CSV_COLUMNS",
    "METHODS",
    "BenchmarkRecord",
    "image_seed",
    "load_image_dir",
    "run_case",
    "run_benchmark",
    "records_to_csv",
    "history_to_csv",
    "worker_count",
]

CSV_COLUMNS = (
    "image", "noise_level", "method", "gamma_source", "ssim", "psnr_db",
    "iterations", "converged", "wall_time_s", "sigma", "tau", "theta", "tol",
    "beta", "lambda", "rho", "seed",
)
# (method, gamma_source)
METHODS = (("tv", "none"), ("tvpwl", "over-tv"), ("tvpwl", "gt"), ("tgv", "none"))
IMAGE_SUFFIXES = (".png", ".pgm", ".raw")
WORKERS_ENV = "TVPWL_WORKERS"


@dataclass
class BenchmarkRecord:
    image: str
    noise_level: float
    method: str
    gamma_source: str
    ssim: float
    psnr_db: float
    iterations: int
    converged: bool
    wall_time_s: float
    sigma: float
    tau: float
    theta: float
    tol: float
    beta: object = ""
    lam: object = ""
    rho: object = ""
    seed: int = 0

    def row(self):
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return [_fmt(d[c]) for c in CSV_COLUMNS]


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def image_seed(name, global_seed):
    """Per-image noise seed: CRC-32 of the file name plus the global seed."""
    return (zlib.crc32(name.encode("utf-8")) + int(global_seed)) % (2 ** 63)


def worker_count():
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def load_image_dir(path):
    """Map file name -> image for every supported file directly in `path`."""
    path = Path(path)
    files = sorted(p for p in path.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    if not files:
        raise FileNotFoundError(f"no .png/.pgm/.raw images in {path}")
    return {p.name: read_image(p) for p in files}


def run_case(name, u_gt, noise_level, seed, params=None, gamma_params=None, tgv=None,
             methods=METHODS, peak=255.0, noise_sigma=None):
    """Run the methods on one image at one noise level.

    Returns ``(records, histories)`` where `histories` maps a run label to
    ``(residual_history, gap_history)``.
    """
    params = params or SolverParams()
    gamma_params = gamma_params or GammaEstimateParams()
    tgv = tgv or TgvParams()
    f, delta = add_gaussian_noise(u_gt, NoiseSpec(level=noise_level, seed=seed, peak=peak,
                                                  sigma=noise_sigma))
    records, histories = [], {}
    common = dict(image=name, noise_level=float(noise_level), sigma=params.sigma,
                  tau=params.tau, theta=params.theta, tol=params.tol, seed=seed)
    for method, source in methods:
        extra = {}
        if method == "tv":
            rep = solve_tv(f, delta, params)
        elif method == "tgv":
            rep = solve_tgv2(f, delta, tgv, params)
            extra["beta"] = tgv.beta
        elif source == "gt":
            rep = solve_tvpwl(f, gamma_from_ground_truth(u_gt), delta, params)
        elif source == "over-tv":
            gamma = estimate_gamma_over_tv(f, gamma_params)
            rep = solve_tvpwl(f, gamma, delta, params)
            extra["lam"] = gamma_params.lam
            extra["rho"] = gamma_params.rho
        else:
            raise ValueError(f"unknown method {method}/{source}")
        u = rep.final_u
        records.append(BenchmarkRecord(
            method=method, gamma_source=source,
            ssim=ssim(u, u_gt, peak), psnr_db=psnr(u, u_gt, peak),
            iterations=rep.iterations, converged=rep.converged,
            wall_time_s=rep.wall_time, **common, **extra,
        ))
        label = method if source == "none" else f"{method}_{source}"
        histories[label] = (rep.residual_history, rep.gap_history)
    return records, histories


def _case(args):
    return run_case(*args[:4], **args[4])


def run_benchmark(images, noise_levels, global_seed=0, params=None, gamma_params=None,
                  tgv=None, workers=None, peak=255.0, noise_sigma=None):
    """Benchmark every image at every noise level.

    `images` maps an image id to its ground truth. Cases run in a process
    pool of `workers` (default: ``$TVPWL_WORKERS`` or 1); results come back
    in input order.
    """
    if not images:
        raise ValueError("no images to benchmark")
    workers = workers or worker_count()
    kw = dict(params=params, gamma_params=gamma_params, tgv=tgv, peak=peak,
              noise_sigma=noise_sigma)
    jobs = [
        (name, u, level, image_seed(name, global_seed), kw)
        for name, u in images.items()
        for level in noise_levels
    ]
    if workers == 1:
        results = [_case(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_case, jobs))
    records, histories = [], {}
    for (name, _, level, _, _), (recs, hist) in zip(jobs, results):
        records.extend(recs)
        for label, h in hist.items():
            histories[(name, level, label)] = h
    return records, histories


def records_to_csv(records):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def history_to_csv(residuals, gaps):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("iter", "residual", "gap"))
    for k, (r, g) in enumerate(zip(residuals, gaps), start=1):
        w.writerow((k, repr(float(r)), repr(float(g))))
    return buf.getvalue()


def write_benchmark(out_dir, records, histories):
    """Write ``results.csv`` and ``histories/<image>_n<level>_<method>.csv``."""
    out_dir = Path(out_dir)
    hdir = out_dir / "histories"
    hdir.mkdir(parents=True, exist_ok=True)
    _atomic_write(out_dir / "results.csv", records_to_csv(records).encode())
    for (name, level, label), (res, gap) in histories.items():
        stem = f"{Path(name).stem}_n{level:g}_{label}.csv"
        _atomic_write(hdir / stem, history_to_csv(res, gap).encode())
    return out_dir / "results.csv"
