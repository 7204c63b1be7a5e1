"""Command-line front end: ``tvpwl {denoise,estimate-gamma,add-noise,benchmark,check}``.

Exit codes: 0 success, 1 I/O failure, 2 solver stopped at ``--max-iter``
without converging (results are still written), 64 usage error.
"""
import argparse
import json
import logging
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import benchmark as bench
from .checks import format_table, run_checks
from .gamma import GammaEstimateParams, estimate_gamma_over_tv, gamma_from_ground_truth
from .imageio import ImageFormatError, _atomic_write, read_image, write_image
from .metrics import RNG_ALGORITHM, NoiseSpec, add_gaussian_noise, psnr, ssim
from .solvers import SolverParams, TgvParams, solve_tgv2, solve_tv, solve_tvpwl
from .synthetic import generate_synthetic

log = logging.getLogger("tvpwl")

EXIT_OK, EXIT_IO, EXIT_NONCONVERGED, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _solver_flags(p):
    d = SolverParams()
    g = p.add_argument_group("solver")
    g.add_argument("--sigma", type=float, default=d.sigma, help="dual step (default 0.99/sqrt(8))")
    g.add_argument("--tau", type=float, default=d.tau, help="primal step (default 0.99/sqrt(8))")
    g.add_argument("--theta", type=float, default=d.theta)
    g.add_argument("--tol", type=float, default=d.tol, help="residual exit tolerance")
    g.add_argument("--max-iter", type=int, default=d.max_iter)
    g.add_argument("--beta", type=float, default=TgvParams().beta, help="TGV second-order weight")


def _gamma_flags(p):
    d = GammaEstimateParams()
    g = p.add_argument_group("gamma estimation")
    g.add_argument("--lambda", dest="lam", type=float, default=d.lam, help="over-TV weight")
    g.add_argument("--rho", type=float, default=d.rho, help="Gaussian smoothing std (pixels)")
    g.add_argument("--rof-tol", type=float, default=d.rof_tol)
    g.add_argument("--rof-max-iter", type=int, default=d.rof_max_iter)


def _noise_flags(p, multiple=False):
    g = p.add_argument_group("noise")
    if multiple:
        g.add_argument("--noise-level", type=float, nargs="+", default=[0.10])
    else:
        g.add_argument("--noise-level", type=float, default=0.10,
                       help="noise std as a fraction of --peak")
    g.add_argument("--noise-sigma", type=float, default=None,
                   help="absolute noise std; overrides --noise-level")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--peak", type=float, default=255.0)


def build_parser():
    parser = _Parser(prog="tvpwl", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("denoise", help="denoise one image")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--regulariser", choices=("tv", "tvpwl", "tgv"), default="tvpwl")
    p.add_argument("--gamma-source", choices=("file", "over-tv", "gt"), default="over-tv")
    p.add_argument("--gamma", help="gamma map file (with --gamma-source file)")
    p.add_argument("--ground-truth", help="clean image; enables metrics and --gamma-source gt")
    p.add_argument("--delta", type=float, help="fidelity radius ||u - f||_2 <= delta")
    p.add_argument("--noise-std", type=float, help="derive delta = std * sqrt(M N)")
    p.add_argument("--report", help="JSON report path (default: <output>.json)")
    p.add_argument("--peak", type=float, default=255.0)
    _solver_flags(p)
    _gamma_flags(p)

    p = sub.add_parser("estimate-gamma", help="write a gamma map")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--gamma-source", choices=("over-tv", "gt"), default="over-tv")
    p.add_argument("--ground-truth")
    _gamma_flags(p)

    p = sub.add_parser("add-noise", help="add Gaussian noise to a clean image")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--report", help="JSON with delta and noise parameters (default: <output>.json)")
    _noise_flags(p)

    p = sub.add_parser("benchmark", help="TV / TVpwL(over-TV) / TVpwL(GT) / TGV comparison")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--images", help="directory of ground-truth images")
    src.add_argument("--synthetic", action="store_true", help="use the built-in synthetic image")
    p.add_argument("--size", type=int, default=256, help="synthetic image size")
    p.add_argument("--out-dir", default="benchmark_out")
    _noise_flags(p, multiple=True)
    _solver_flags(p)
    _gamma_flags(p)

    sub.add_parser("check", help="run the property suite")
    return parser


def _solver_params(a):
    try:
        return SolverParams(sigma=a.sigma, tau=a.tau, theta=a.theta, tol=a.tol,
                            max_iter=a.max_iter).validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _gamma_params(a):
    try:
        return GammaEstimateParams(lam=a.lam, rho=a.rho, rof_tol=a.rof_tol,
                                   rof_max_iter=a.rof_max_iter)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _tgv_params(a):
    try:
        return TgvParams(beta=a.beta)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _write_json(path, obj):
    _atomic_write(path, (json.dumps(obj, indent=2, sort_keys=True) + "\n").encode())


def _finite(x):
    return x if math.isfinite(x) else None


def cmd_denoise(a):
    params = _solver_params(a)
    gparams = _gamma_params(a)
    tgv = _tgv_params(a)
    if a.regulariser == "tvpwl":
        if a.gamma_source == "file" and not a.gamma:
            raise UsageError("--gamma-source file requires --gamma")
        if a.gamma_source == "gt" and not a.ground_truth:
            raise UsageError("--gamma-source gt requires --ground-truth")
    if a.delta is not None and a.delta < 0:
        raise UsageError("--delta must be nonnegative")
    if a.delta is None and a.noise_std is None and not a.ground_truth:
        raise UsageError("need --delta, --noise-std or --ground-truth to fix delta")

    f = read_image(a.input)
    u_gt = read_image(a.ground_truth) if a.ground_truth else None
    if u_gt is not None and u_gt.shape != f.shape:
        raise UsageError("ground truth and input differ in shape")
    if a.delta is not None:
        delta, delta_source = a.delta, "flag"
    elif a.noise_std is not None:
        delta, delta_source = a.noise_std * math.sqrt(f.size), "noise-std"
    else:
        delta, delta_source = float(np.linalg.norm(f - u_gt)), "ground-truth"

    gamma_source = None
    if a.regulariser == "tv":
        rep = solve_tv(f, delta, params)
    elif a.regulariser == "tgv":
        rep = solve_tgv2(f, delta, tgv, params)
    else:
        gamma_source = a.gamma_source
        if a.gamma_source == "file":
            gamma = read_image(a.gamma)
            if gamma.shape != f.shape:
                raise UsageError("gamma map and input differ in shape")
        elif a.gamma_source == "gt":
            gamma = gamma_from_ground_truth(u_gt)
        else:
            gamma = estimate_gamma_over_tv(f, gparams)
        rep = solve_tvpwl(f, gamma, delta, params)

    write_image(a.output, rep.final_u)
    report = {
        "command": "denoise",
        "input": str(a.input),
        "output": str(a.output),
        "regulariser": a.regulariser,
        "gamma_source": gamma_source,
        "delta": delta,
        "delta_source": delta_source,
        "iterations": rep.iterations,
        "converged": rep.converged,
        "final_residual": rep.final_residual,
        "wall_time_s": rep.wall_time,
        "residual_history": rep.residual_history,
        "gap_history": rep.gap_history,
        "params": {**asdict(params), "beta": tgv.beta, **asdict(gparams)},
    }
    if u_gt is not None:
        report["ssim"] = ssim(rep.final_u, u_gt, a.peak) if min(f.shape) >= 11 else None
        report["psnr_db"] = _finite(psnr(rep.final_u, u_gt, a.peak))
    _write_json(a.report or f"{a.output}.json", report)
    log.info("denoise: %d iterations, converged=%s", rep.iterations, rep.converged)
    return EXIT_OK if rep.converged else EXIT_NONCONVERGED


def cmd_estimate_gamma(a):
    gparams = _gamma_params(a)
    if a.gamma_source == "gt":
        if not a.ground_truth:
            raise UsageError("--gamma-source gt requires --ground-truth")
        gamma = gamma_from_ground_truth(read_image(a.ground_truth))
    else:
        gamma = estimate_gamma_over_tv(read_image(a.input), gparams)
    write_image(a.output, gamma)
    return EXIT_OK


def cmd_add_noise(a):
    try:
        spec = NoiseSpec(level=a.noise_level, seed=a.seed, peak=a.peak, sigma=a.noise_sigma)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    u = read_image(a.input)
    f, delta = add_gaussian_noise(u, spec)
    write_image(a.output, f)
    _write_json(a.report or f"{a.output}.json", {
        "command": "add-noise", "input": str(a.input), "output": str(a.output),
        "delta": delta, "noise_std": spec.std, "noise_level": a.noise_level,
        "noise_sigma": a.noise_sigma, "seed": a.seed, "peak": a.peak, "rng": RNG_ALGORITHM,
    })
    return EXIT_OK


def cmd_benchmark(a):
    params = _solver_params(a)
    gparams = _gamma_params(a)
    tgv = _tgv_params(a)
    if a.synthetic:
        if a.size < 64:
            raise UsageError("--size must be at least 64")
        images = {"synthetic": generate_synthetic((a.size, a.size))}
    else:
        images = bench.load_image_dir(a.images)
    params.record_history = True
    records, histories = bench.run_benchmark(
        images, a.noise_level, a.seed, params, gparams, tgv,
        peak=a.peak, noise_sigma=a.noise_sigma,
    )
    out = Path(a.out_dir)
    csv_path = bench.write_benchmark(out, records, histories)
    _write_json(out / "params.json", {
        "solver": asdict(params), "gamma": asdict(gparams), "tgv": asdict(tgv),
        "noise_levels": a.noise_level, "noise_sigma": a.noise_sigma, "seed": a.seed,
        "peak": a.peak, "rng": RNG_ALGORITHM, "images": sorted(images),
    })
    print(csv_path.read_text(), end="")
    return EXIT_OK if all(r.converged for r in records) else EXIT_NONCONVERGED


def cmd_check(a):
    results = run_checks()
    print(format_table(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_IO


COMMANDS = {
    "denoise": cmd_denoise,
    "estimate-gamma": cmd_estimate_gamma,
    "add-noise": cmd_add_noise,
    "benchmark": cmd_benchmark,
    "check": cmd_check,
}


def main(argv=None):
    parser = build_parser()
    a = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[a.command](a)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"tvpwl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ImageFormatError) as exc:
        print(f"tvpwl: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
