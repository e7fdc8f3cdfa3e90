"""Command line entry point.

Exit codes: 0 success, 1 a verification check failed, 2 bad usage or input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .conformal import RootFindingError, ray_tips, simplicity_check, step_profile, trace
from .distributions import Distribution
from .fourier import QuadratureError, cosine_coefficients, default_order, format_csv
from .geometry import GeometryError, default_y_max, polygonize
from .io import InputError, load_distribution, write_boundary_csv, write_tips_json
from .montecarlo import (SimConfig, SimMode, SimulationError, simulate_disc, simulate_domain,
                         write_samples_csv)
from .svg import render_svg
from .verify import Budget, run_checks

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    dist: str
    params: dict
    version: str = __version__
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def to_json(self, with_timestamp: bool = True) -> dict:
        d = {"command": self.command, "dist": self.dist, "params": self.params,
             "version": self.version}
        if with_timestamp:
            d["timestamp"] = self.timestamp
        return d

    def write_sidecar(self, out: Path) -> None:
        side = out.with_name(out.name + ".manifest.json")
        side.write_text(json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _seed(arg: int | None) -> int:
    if arg is not None:
        return arg
    env = os.environ.get("SKODOM_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"SKODOM_SEED must be an integer, got {env!r}") from None


def _load(args) -> Distribution:
    return load_distribution(args.dist)


def _out(args) -> Path | None:
    return Path(args.out) if args.out else None


def _emit(text: str, out: Path | None, manifest: RunManifest) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.write_text(text, encoding="utf-8")
    manifest.write_sidecar(out)


def cmd_coeffs(args) -> int:
    dist = _load(args)
    n = args.n or default_order(dist)
    series = cosine_coefficients(dist, n)
    manifest = RunManifest("coeffs", args.dist, {"n": n, "method": series.method.value})
    _emit(format_csv(series), _out(args), manifest)
    return EXIT_OK


def cmd_trace(args) -> int:
    dist = _load(args)
    n = args.n or default_order(dist)
    series = cosine_coefficients(dist, n)
    curve = trace(series, dist, args.grid)
    manifest = RunManifest("trace", args.dist, {"n": n, "grid": args.grid,
                                                 "abel_radius": curve.abel_radius})
    out = _out(args)
    if out is None:
        sys.stdout.write("theta,x,y,diverged\n")
        for t, x, y, d in curve.rows():
            sys.stdout.write(f"{t:.17g},{x:.17g},{y:.17g},{int(d)}\n")
    else:
        write_boundary_csv(curve, out)
        manifest.write_sidecar(out)
    if args.svg:
        svg_path = Path(args.svg)
        svg_path.write_text(render_svg(curve, title=Path(args.dist).stem), encoding="utf-8")
        manifest.write_sidecar(svg_path)
    simple, _ = simplicity_check(curve, allow_slits=True)
    if not simple:
        print("warning: traced boundary is not simple", file=sys.stderr)
    return EXIT_OK


def cmd_tips(args) -> int:
    dist = _load(args)
    if not dist.is_atomic:
        raise UsageError("tips require atomic distribution")
    tips = ray_tips(step_profile(dist))
    manifest = RunManifest("tips", args.dist, {})
    out = _out(args)
    if out is None:
        sys.stdout.write(json.dumps({"tips": tips.to_json()}, indent=2) + "\n")
    else:
        write_tips_json(tips, out)
        manifest.write_sidecar(out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    dist = _load(args)
    mode = SimMode(args.mode)
    seed = _seed(args.seed)
    n = args.n or default_order(dist)
    series = cosine_coefficients(dist, n)
    cfg = SimConfig(args.paths, args.dt, seed, mode, threads=args.threads,
                    params={"n": n, "grid": args.grid, "y_max": args.ymax})
    if mode is SimMode.DISC:
        report = simulate_disc(series, dist, cfg)
    else:
        curve = trace(series, dist, args.grid)
        tips = ray_tips(step_profile(dist)) if dist.is_atomic else None
        y_max = args.ymax or default_y_max(dist, tips)
        report = simulate_domain(polygonize(curve, y_max), dist, cfg)
    manifest = RunManifest("simulate", args.dist, cfg.echo())
    body = report.to_json()
    body["manifest"] = manifest.to_json(with_timestamp=False)
    text = json.dumps(body, indent=2, sort_keys=True) + "\n"
    out = _out(args)
    if out is None:
        sys.stdout.write(text)
    else:
        write_samples_csv(report, out)
        manifest.write_sidecar(out)
        rep = out.with_name(out.stem + ".report.json")
        rep.write_text(text, encoding="utf-8")
        manifest.write_sidecar(rep)
    return EXIT_OK


def cmd_verify(args) -> int:
    dist = _load(args)
    budget = Budget(n=args.n, grid=args.grid, paths=args.paths, dt=args.dt, seed=_seed(args.seed),
                    mode=SimMode(args.mode), y_max=args.ymax, threads=args.threads,
                    simulate=not args.no_simulate)
    checks = run_checks(dist, budget)
    manifest = RunManifest("verify", args.dist, budget.echo())
    passed = all(c.passed for c in checks)
    body = {"passed": passed, "checks": [c.to_json() for c in checks],
            "manifest": manifest.to_json(with_timestamp=False)}
    text = json.dumps(body, indent=2, sort_keys=True) + "\n"
    _emit(text, _out(args), manifest)
    for c in checks:
        if not c.passed:
            print(f"FAIL {c.name}: {c.message}", file=sys.stderr)
    return EXIT_OK if passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skodom", description=(
        "Build the planar domain whose Brownian exit x-coordinate has a given law, "
        "trace its boundary and check the embedding."))
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, n=True, out=True):
        p.add_argument("--dist", required=True, metavar="PATH", help="distribution JSON file")
        if n:
            p.add_argument("--n", type=int, default=None, metavar="INT",
                           help="truncation order (default 4096, 65536 for the Cantor law)")
        if out:
            p.add_argument("--out", metavar="PATH", help="output file (default stdout)")
        p.add_argument("--threads", type=int, default=1, metavar="INT", help="worker threads")

    def sim(p):
        p.add_argument("--grid", type=int, default=2001, metavar="INT")
        p.add_argument("--paths", type=int, default=10_000, metavar="INT")
        p.add_argument("--dt", type=float, default=1e-4, metavar="FLOAT")
        p.add_argument("--seed", type=int, default=None, metavar="INT",
                       help="RNG seed (falls back to SKODOM_SEED, then 0)")
        p.add_argument("--mode", choices=[m.value for m in SimMode], default="disc")
        p.add_argument("--ymax", type=float, default=None, metavar="FLOAT",
                       help="truncation height for unbounded rays")

    p = sub.add_parser("coeffs", help="cosine coefficients a_0..a_N as CSV")
    common(p)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("trace", help="boundary samples as CSV, optionally an SVG")
    common(p)
    p.add_argument("--grid", type=int, default=2001, metavar="INT")
    p.add_argument("--svg", metavar="PATH")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("tips", help="ray tips of an atomic law as JSON")
    common(p, n=False)
    p.set_defaults(func=cmd_tips)

    p = sub.add_parser("simulate", help="Monte Carlo exit samples and report")
    common(p)
    sim(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run every check and write a verdict JSON")
    common(p)
    sim(p)
    p.set_defaults(paths=2000)
    p.add_argument("--no-simulate", action="store_true", help="skip the Monte Carlo checks")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "threads", 1) < 1:
            raise UsageError("--threads must be at least 1")
        return args.func(args)
    except (QuadratureError, RootFindingError, GeometryError, SimulationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, InputError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
