"""Command-line driver.

Human-readable summaries go to stdout; machine-readable artifacts are only
written to ``--out`` (and ``--csv``). Exit codes: 0 success, 2 usage or
configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import secrets
import sys
from typing import List, Optional

import numpy as np

from . import io
from .channels import PartialTraceChannel
from .dvoretzky import estimate_M, shrinking_experiment, window_experiment
from .ensembles import Isometry, RngStream, haar_isometry, stream_id
from .errors import DimensionError, InvalidOrderError, ShapeError
from .linalg import parse_order
from .optimize import AscentConfig, estimate_max_output_norm
from .violation import ScanGrid, run_scan, run_violation

SEED_ENV = "RENYI_DVORETZKY_SEED"

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _order(text: str) -> float:
    try:
        return parse_order(text)
    except InvalidOrderError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _resolve_seed(seed: Optional[int]) -> int:
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return secrets.randbits(63)


def _ascent_args(p: argparse.ArgumentParser) -> None:
    d = AscentConfig()
    p.add_argument("--restarts", type=int, default=d.restarts)
    p.add_argument("--iters", type=int, default=d.max_iters)
    p.add_argument("--samples", type=int, default=d.sample_baseline,
                   help="random inputs evaluated as a baseline")
    p.add_argument("--grad-tol", type=float, default=d.grad_tol)


def _ascent_cfg(args) -> AscentConfig:
    try:
        return AscentConfig(restarts=args.restarts, max_iters=args.iters,
                            sample_baseline=args.samples, grad_tol=args.grad_tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="renyi-dvoretzky", description=__doc__.splitlines()[0])
    parser.add_argument("--threads", type=int, default=1, help="worker threads (0 = auto)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("channel-sample", help="sample a Haar random channel")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--real", action="store_true", help="real (orthogonal) isometry")
    p.add_argument("--out", required=True)

    p = sub.add_parser("maxnorm", help="estimate the maximum output p-norm of a channel file")
    p.add_argument("--channel", required=True)
    p.add_argument("--p", type=_order, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    _ascent_args(p)

    p = sub.add_parser("violation", help="single multiplicativity experiment")
    p.add_argument("--p", type=_order, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--m", type=int, help="defaults to round(d^(1+1/p))")
    p.add_argument("--seed", type=int)
    p.add_argument("--real", action="store_true")
    p.add_argument("--out")
    _ascent_args(p)

    p = sub.add_parser("scan", help="grid of violation experiments")
    p.add_argument("--config-file", help="JSON grid/ascent config; defaults used for missing keys")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")

    p = sub.add_parser("dvoretzky", help="Schatten-norm concentration experiments")
    dsub = p.add_subparsers(dest="experiment", required=True, parser_class=_Parser)
    e = dsub.add_parser("estimate-m")
    e.add_argument("--d", type=int, required=True)
    e.add_argument("--q", type=_order, required=True)
    e.add_argument("--samples", type=int, default=500)
    e.add_argument("--seed", type=int)
    e.add_argument("--out")
    w = dsub.add_parser("window")
    w.add_argument("--d", type=int, required=True)
    w.add_argument("--q", type=_order, required=True)
    w.add_argument("--m", type=int, required=True)
    w.add_argument("--trials", type=int, default=20)
    w.add_argument("--seed", type=int)
    w.add_argument("--out")
    w.add_argument("--csv")
    _ascent_args(w)
    s = dsub.add_parser("shrink")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--q", type=_order, required=True)
    s.add_argument("--m-list", type=lambda t: [int(v) for v in t.split(",")], required=True,
                   help="comma-separated subspace dimensions")
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--seed", type=int)
    s.add_argument("--out")
    s.add_argument("--csv")
    _ascent_args(s)
    return parser


def _emit(path: Optional[str], obj) -> None:
    if path:
        io.write_json(path, obj)


def _cmd_channel_sample(args) -> None:
    seed = _resolve_seed(args.seed)
    field = "real" if args.real else "complex"
    if args.d < 1 or not 1 <= args.m <= args.d**2:
        raise UsageError(f"need d >= 1 and 1 <= m <= d^2, got d={args.d}, m={args.m}")
    rng = RngStream(seed, stream_id("channel-sample", args.m, args.d, field))
    iso = haar_isometry(args.m, args.d, args.d, field, rng)
    io.write_json(args.out, iso.to_dict())
    print(f"sampled {field} channel m={args.m} d={args.d} seed={seed} -> {args.out}")


def _cmd_maxnorm(args) -> None:
    if args.p <= 1:
        raise UsageError("p must be > 1")
    try:
        iso = Isometry.from_dict(io.read_json(args.channel))
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read channel file {args.channel}: {exc}") from None
    seed = _resolve_seed(args.seed)
    cfg = _ascent_cfg(args)
    est = estimate_max_output_norm(PartialTraceChannel(iso), args.p, cfg, RngStream(seed, stream_id("maxnorm")))
    report = {
        "schema": io.SCHEMA_VERSION,
        "config": {"command": "maxnorm", "channel": args.channel, "p": args.p, "seed": seed,
                   "m": iso.m, "d": iso.d, "r": iso.r, "ascent": cfg.to_dict()},
        "estimate": est.to_dict(include_input=True),
        "floor": iso.d ** (1 / args.p - 1),
    }
    _emit(args.out, report)
    print(f"max output {args.p:g}-norm estimate {est.best_value:.10g} "
          f"(floor {report['floor']:.6g}, baseline {est.baseline_max:.6g}; lower bound)")


def _warn_small_p(p: float) -> None:
    if p < 1.5:
        print(f"warning: p = {p:g} < 1.5; desk-scale d is unlikely to exhibit a violation",
              file=sys.stderr)


def _cmd_violation(args) -> None:
    if args.p <= 1:
        raise UsageError("p must be > 1")
    _warn_small_p(args.p)
    seed = _resolve_seed(args.seed)
    if args.d < 2 or (args.m is not None and not 1 <= args.m <= args.d**2):
        raise UsageError("need d >= 2 and 1 <= m <= d^2")
    rep = run_violation(args.p, args.d, args.m, "real" if args.real else "complex", seed,
                        _ascent_cfg(args))
    _emit(args.out, {"schema": io.SCHEMA_VERSION, "reports": [rep], "summary": None})
    print(rep.summary_line())


def _cmd_scan(args) -> None:
    conf = {}
    if args.config_file:
        try:
            conf = io.read_json(args.config_file)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {args.config_file}: {exc}") from None
    try:
        grid = ScanGrid.from_dict(conf)
        cfg = AscentConfig(**conf.get("ascent", {}))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid scan config: {exc}") from None
    seed = args.seed if args.seed is not None else conf.get("seed")
    seed = _resolve_seed(seed)
    for p in grid.p_values:
        _warn_small_p(parse_order(p))
    reports, summary = run_scan(grid, cfg, seed, args.threads)
    _emit(args.out, {
        "schema": io.SCHEMA_VERSION,
        "config": {"grid": grid.to_dict(), "ascent": cfg.to_dict(), "seed": seed},
        "reports": reports,
        "summary": summary,
    })
    for rep in reports:
        print(rep.summary_line())
    for row in summary:
        print(f"p={row['p']:g} d={row['d']} m={row['m']}: violation fraction "
              f"{row['violation_fraction']:.2f}, mean additivity gap {row['mean_additivity_gap']:.6g}")


WINDOW_FIELDS = ["d", "q", "m", "trial", "max_ratio", "min_ratio"]


def _cmd_dvoretzky(args) -> None:
    if args.q < 2:
        raise UsageError("q must be >= 2")
    seed = _resolve_seed(args.seed)
    rng = RngStream(seed, stream_id("dvoretzky", args.experiment))
    base = {"command": f"dvoretzky {args.experiment}", "d": args.d, "q": args.q, "seed": seed}
    if args.experiment == "estimate-m":
        if args.samples < 2:
            raise UsageError("need at least 2 samples")
        stats = estimate_M(args.d, args.q, args.samples, rng, args.threads)
        base["samples"] = args.samples
        _emit(args.out, {"schema": io.SCHEMA_VERSION, "config": base, "stats": stats})
        print(f"d={args.d} q={args.q:g}: M_hat={stats.M_hat:.8g} +- {stats.M_stderr:.2g}, "
              f"E||X||_inf*sqrt(d)={stats.opnorm_mean_hat * np.sqrt(args.d):.6g}, "
              f"Holder bound {stats.holder_bound:.6g}")
        return
    if args.q == 2:
        raise UsageError("window and shrink need q > 2")
    cfg = _ascent_cfg(args)
    base.update(trials=args.trials, ascent=cfg.to_dict())
    if args.experiment == "window":
        if not 1 <= args.m <= args.d**2:
            raise UsageError("need 1 <= m <= d^2")
        base["m"] = args.m
        win = window_experiment(args.d, args.q, args.m, args.trials, cfg, rng, threads=args.threads)
        _emit(args.out, {"schema": io.SCHEMA_VERSION, "config": base, "window": win})
        if args.csv:
            io.write_text(args.csv, io.rows_to_csv(win.rows(), WINDOW_FIELDS))
        print(f"d={args.d} q={args.q:g} m={args.m}: M_hat={win.M_hat:.6g}, "
              f"worst max/min={win.ratio_spread:.4g}, epsilon_eff={win.epsilon_effective:.4g}")
        return
    if any(not 1 <= m <= args.d**2 for m in args.m_list):
        raise UsageError("every m must lie in [1, d^2]")
    base["m_list"] = args.m_list
    pts = shrinking_experiment(args.d, args.q, args.m_list, args.trials, cfg, rng, threads=args.threads)
    _emit(args.out, {"schema": io.SCHEMA_VERSION, "config": base, "sweep": pts})
    if args.csv:
        rows = [dict(d=args.d, q=args.q, m=pt.m, trial=t, max_ratio=v, min_ratio=None)
                for pt in pts for t, v in enumerate(pt.per_trial)]
        io.write_text(args.csv, io.rows_to_csv(rows, WINDOW_FIELDS))
    for pt in pts:
        print(f"m={pt.m}: worst max ratio {pt.worst_max_ratio:.6g}, empirical C {pt.empirical_C:.4g}")


COMMANDS = {
    "channel-sample": _cmd_channel_sample,
    "maxnorm": _cmd_maxnorm,
    "violation": _cmd_violation,
    "scan": _cmd_scan,
    "dvoretzky": _cmd_dvoretzky,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DimensionError, InvalidOrderError, ShapeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except np.linalg.LinAlgError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
