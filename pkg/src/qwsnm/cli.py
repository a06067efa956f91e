"""Command-line front end: ``degrade``, ``denoise``, ``deblur`` and ``bench``.

Every solver setting can come from a flat ``key = value`` file passed with
``--config``; flags given on the command line override file values, and the
resulting configuration is echoed as ``# key = value`` lines at the top of
every CSV the tool writes.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .degradation import DegradationModel, degrade, parse_kernel
from .imageio import load_image, read_config, read_png, write_png, write_sidecar
from .metrics import quality_report
from .solver import SolverConfig, default_deblur_config, default_denoise_config, restore

__all__ = ["main", "build_parser", "parse_sweep", "BENCH_COLUMNS"]

log = logging.getLogger("qwsnm")

BENCH_COLUMNS = ("image", "scenario", "psnr_in", "ssim_in", "psnr_out", "ssim_out", "seconds")


def _bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt_float(text: str) -> float | None:
    return None if str(text).strip().lower() in ("none", "") else float(text)


# option name -> (SolverConfig field, converter)
SOLVER_KEYS = {
    "mode": ("mode", str),
    "p": ("p", float),
    "lambda": ("lam", float),
    "beta0": ("beta0", float),
    "mu": ("mu", float),
    "iters": ("iters", int),
    "gst_iters": ("gst_iters", int),
    "patch_size": ("w", int),
    "group_size": ("M", int),
    "window": ("W", int),
    "stride": ("stride", int),
    "c": ("c", float),
    "eps": ("eps", float),
    "early_stop": ("early_stop", _opt_float),
    "weight_sqrt_m": ("weight_sqrt_m", _bool),
    "noise_compensated": ("noise_compensated", _bool),
    "workers": ("workers", int),
}
RUN_KEYS = {"kernel": str, "sigma": float, "seed": int}


class CliError(Exception):
    pass


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("solver overrides")
    g.add_argument("--mode", choices=["wnnm", "wsnm"])
    g.add_argument("--p", type=float, help="Schatten power in (0, 1]")
    g.add_argument("--lambda", dest="lambda", type=float, help="data-fidelity weight")
    g.add_argument("--beta0", type=float, help="initial penalty")
    g.add_argument("--mu", type=float, help="continuation factor (> 1)")
    g.add_argument("--iters", type=int, help="outer iterations K")
    g.add_argument("--gst-iters", type=int, help="GST fixed-point iterations J")
    g.add_argument("--patch-size", type=int, help="patch side w")
    g.add_argument("--group-size", type=int, help="patches per group M")
    g.add_argument("--window", type=int, help="search window W")
    g.add_argument("--stride", type=int, help="key patch stride")
    g.add_argument("--c", type=float, help="weight constant")
    g.add_argument("--eps", type=float, help="weight offset")
    g.add_argument("--early-stop", type=_opt_float, help="relative-change stop tolerance or 'none'")
    g.add_argument("--weight-sqrt-m", action=argparse.BooleanOptionalAction, default=None,
                   help="scale the weight constant by sqrt(M)")
    g.add_argument("--noise-compensated", action=argparse.BooleanOptionalAction, default=None,
                   help="estimate clean singular values before weighting")
    g.add_argument("--workers", type=int, help="threads for the group solves")
    p.add_argument("--config", type=Path, help="key = value file; flags override it")


def _add_run_flags(p: argparse.ArgumentParser, kernel_default: str | None, sigma_required: bool):
    p.add_argument("--kernel", default=None,
                   help="identity | uniform:S | gaussian:S:STD | motion:LEN:ANGLE"
                   + (f" (default {kernel_default})" if kernel_default else ""))
    p.add_argument("--sigma", type=float, default=None,
                   help="noise standard deviation on the [0, 255] scale"
                   + ("" if sigma_required else " (default 0)"))
    p.add_argument("--seed", type=int, default=None, help="noise seed (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwsnm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("degrade", help="blur and add noise to a clean PNG")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    _add_run_flags(p, "identity", sigma_required=False)
    p.add_argument("--save-float", action="store_true",
                   help="also write the unclipped result as OUT with a .qimg suffix")
    p.add_argument("--config", type=Path)

    for name, what in (("denoise", "remove Gaussian noise"), ("deblur", "remove blur and noise")):
        p = sub.add_parser(name, help=what)
        p.add_argument("--input", required=True, type=Path, help="PNG or .qimg sidecar")
        p.add_argument("--out", required=True, type=Path)
        p.add_argument("--clean", type=Path, help="reference image; prints PSNR/SSIM")
        p.add_argument("--trace", type=Path, help="write the convergence trace CSV here")
        p.add_argument("--save-float", action="store_true")
        _add_run_flags(p, None if name == "deblur" else "identity", sigma_required=True)
        _add_solver_flags(p)

    p = sub.add_parser("bench", help="degrade, restore and score a directory of PNGs")
    p.add_argument("--input", required=True, type=Path, help="directory of clean PNGs")
    p.add_argument("--csv", required=True, type=Path)
    p.add_argument("--kernel", action="append", default=None,
                   help="scenario kernel; repeat for several (default identity)")
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--sweep-p", default=None, help="a:b:step or a comma list of p values")
    _add_solver_flags(p)
    return parser


def parse_sweep(text: str) -> list[float]:
    """``"0.8:1.0:0.05"`` (inclusive) or ``"0.85,0.95,1.0"``."""
    try:
        if ":" in text:
            a, b, step = (float(s) for s in text.split(":"))
            if step <= 0 or b < a:
                raise ValueError
            vals = np.arange(a, b + step / 2, step)
            return [round(float(v), 10) for v in vals]
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise CliError(f"bad --sweep-p value {text!r}") from None


def _gather(args) -> tuple[dict, dict]:
    """Merge config file and flags into (run settings, solver overrides)."""
    run: dict = {}
    solver: dict = {}
    if getattr(args, "config", None) is not None:
        for key, raw in read_config(args.config).items():
            try:
                if key in RUN_KEYS:
                    run[key] = RUN_KEYS[key](raw)
                elif key in SOLVER_KEYS:
                    field, conv = SOLVER_KEYS[key]
                    solver[field] = conv(raw)
                else:
                    raise CliError(f"{args.config}: unknown key {key!r}")
            except ValueError as exc:
                raise CliError(f"{args.config}: bad value for {key!r}: {exc}") from None
    for key in RUN_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            run[key] = val
    for key, (field, _) in SOLVER_KEYS.items():
        val = getattr(args, key, None)
        if val is not None:
            solver[field] = val
    return run, solver


def _kernel_list(run: dict, default: str) -> list[str]:
    k = run.get("kernel", default)
    return list(k) if isinstance(k, list) else [k]


def _base_config(kernel_spec: str, sigma: float, seed: int) -> SolverConfig:
    kernel = parse_kernel(kernel_spec)
    if kernel.is_identity:
        return default_denoise_config(sigma, seed=seed)
    return default_deblur_config(kernel.name, seed=seed)


def _header(cfg: SolverConfig, **extra) -> dict:
    h = {"qwsnm_version": __version__}
    h.update(extra)
    h.update(cfg.as_dict())
    return h


def cmd_degrade(args) -> int:
    run, _ = _gather(args)
    kernel = parse_kernel(run.get("kernel", "identity"))
    model = DegradationModel(kernel, run.get("sigma", 0.0), run.get("seed", 0))
    clean = read_png(args.input)
    out = degrade(clean, model)
    write_png(args.out, out)
    if args.save_float:
        write_sidecar(args.out.with_suffix(".qimg"), out)
    q = quality_report(clean, out)
    print(f"degraded: kernel={kernel.name} sigma={model.sigma:g} seed={model.seed} "
          f"psnr={q.psnr:.4f} ssim={q.ssim:.4f}")
    return 0


def cmd_restore(args) -> int:
    run, overrides = _gather(args)
    if args.command == "denoise":
        kernel_spec = run.get("kernel", "identity")
    else:
        if "kernel" not in run:
            raise CliError("deblur needs --kernel")
        kernel_spec = run["kernel"]
    if "sigma" not in run:
        raise CliError(f"{args.command} needs --sigma")
    sigma, seed = run["sigma"], run.get("seed", 0)
    kernel = parse_kernel(kernel_spec)
    if args.command == "deblur" and kernel.is_identity:
        raise CliError("deblur needs a non-identity kernel; use denoise")
    cfg = _base_config(kernel_spec, sigma, seed)
    cfg = cfg.with_overrides(**overrides) if overrides else cfg
    model = DegradationModel(kernel, sigma, seed)

    Y = load_image(args.input)
    clean = read_png(args.clean) if args.clean is not None else None
    X, trace = restore(Y, model, cfg, reference=clean)
    write_png(args.out, X)
    if args.save_float:
        write_sidecar(args.out.with_suffix(".qimg"), X)
    if args.trace is not None:
        trace.to_csv(args.trace, _header(cfg, input=args.input.name, kernel=kernel.name,
                                         sigma=sigma, seed=seed))
    print(f"restored {args.input} -> {args.out} in {len(trace)} iterations")
    if clean is not None:
        q_in, q_out = quality_report(clean, Y), quality_report(clean, X)
        print(f"psnr_in={q_in.psnr:.4f} ssim_in={q_in.ssim:.4f} "
              f"psnr_out={q_out.psnr:.4f} ssim_out={q_out.ssim:.4f}")
    return 0


def _fmt(x: float) -> str:
    return repr(float(x))


def cmd_bench(args) -> int:
    run, overrides = _gather(args)
    images = sorted(p for p in Path(args.input).glob("*.png"))
    if not images:
        raise CliError(f"no PNG images in {args.input}")
    kernels = _kernel_list(run, "identity")
    sigma = run.get("sigma", 25.0)
    seed = run.get("seed", 0)
    p_values = parse_sweep(args.sweep_p) if args.sweep_p else [None]

    scenarios = []
    for spec in kernels:
        kernel = parse_kernel(spec)
        cfg = _base_config(spec, sigma, seed)
        cfg = cfg.with_overrides(**overrides) if overrides else cfg
        for p in p_values:
            c = cfg if p is None else cfg.with_overrides(p=p)
            label = f"{kernel.name}/s{sigma:g}" + ("" if p is None else f"/p{p:g}")
            scenarios.append((label, kernel, c))

    rows = []
    for label, kernel, cfg in scenarios:
        per_image = []
        for index, path in enumerate(images):
            clean = read_png(path)
            # per-image seeds keep results independent of directory order changes
            model = DegradationModel(kernel, sigma, seed ^ index)
            Y = degrade(clean, model)
            t0 = time.perf_counter()
            X, _ = restore(Y, model, cfg)
            dt = time.perf_counter() - t0
            q_in, q_out = quality_report(clean, Y), quality_report(clean, X)
            row = [path.stem, label, q_in.psnr, q_in.ssim, q_out.psnr, q_out.ssim, dt]
            per_image.append(row)
            log.info("%s %s: %.2f -> %.2f dB", path.stem, label, q_in.psnr, q_out.psnr)
        rows.extend(per_image)
        mean = np.mean(np.array([r[2:] for r in per_image], dtype=np.float64), axis=0)
        rows.append(["Average", label, *mean])
        print(f"{label}: psnr {mean[0]:.2f} -> {mean[2]:.2f} dB, ssim {mean[1]:.4f} -> {mean[3]:.4f}")

    header = _header(scenarios[0][2], input=str(args.input), kernels=",".join(kernels),
                     sigma=sigma, seed=seed, sweep_p=args.sweep_p or "")
    with open(args.csv, "w", newline="") as fh:
        for k, v in header.items():
            fh.write(f"# {k} = {v}\n")
        writer = csv.writer(fh)
        writer.writerow(BENCH_COLUMNS)
        for r in rows:
            writer.writerow(r[:2] + [_fmt(v) for v in r[2:]])
    return 0


COMMANDS = {"degrade": cmd_degrade, "denoise": cmd_restore, "deblur": cmd_restore,
            "bench": cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (CliError, ValueError, OSError) as exc:
        print(f"qwsnm {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
