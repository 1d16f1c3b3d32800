"""Command-line front end.

Subcommands emit machine-readable CSV (or JSON for ``gap``) preceded by
``#``-prefixed manifest comment lines.  The CSV body below the comments is
byte-reproducible from the manifest: same flags, same bytes, regardless of
--threads.

dB <-> linear conversion happens at this boundary only; everything below
works in linear units.

Exit codes: 0 success, 2 usage, 3 I/O, 4 quadrature non-convergence,
5 target/fit out of range.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import json
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__, analysis, engine
from .beamform import SCHEMES
from .channel import GENERATOR_NAME
from .errors import ConvergenceError, InsufficientDataError, TargetOutOfRangeError
from .specfun import QuadratureSpec

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_CONVERGENCE = 4
EXIT_RANGE = 5

BOUND_METHODS = ("printed", "semi", "mc", "asymptotic")


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to re-create a data file (minus the timestamp,
    which is recorded but excluded from the reproducibility claim)."""

    tool_version: str
    generator: str
    master_seed: int
    config: dict
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def comment_lines(self, command: str) -> list[str]:
        return [
            f"# tool: twrelay {self.tool_version}",
            f"# command: {command}",
            f"# generator: {self.generator}",
            f"# master_seed: {self.master_seed}",
            f"# config: {json.dumps(self.config, sort_keys=True)}",
            f"# timestamp: {self.timestamp}",
        ]

    def to_dict(self) -> dict:
        return {
            "tool_version": self.tool_version,
            "generator": self.generator,
            "master_seed": self.master_seed,
            "config": self.config,
            "timestamp": self.timestamp,
        }


def _make_manifest(seed: int, config: dict) -> RunManifest:
    generator = f"{GENERATOR_NAME} (numpy {np.__version__}, block {engine.TRIAL_BLOCK})"
    return RunManifest(__version__, generator, seed, config)


def _fmt(value) -> str:
    """Round-trip-exact decimal formatting (shortest repr)."""
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from exc
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError(f"expected positive integers, got {text!r}")
    return values


def _grid_spec(text: str) -> list[float]:
    """Inclusive lo:step:hi grid, e.g. 0:5:40.  lo:step:lo is a single point."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid spec must be lo:step:hi, got {text!r}")
    try:
        lo, step, hi = (float(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid spec {text!r}") from exc
    if step <= 0:
        raise argparse.ArgumentTypeError("grid step must be positive")
    if hi < lo:
        raise argparse.ArgumentTypeError("grid hi must be >= lo")
    count = int((hi - lo) / step + 1e-9) + 1
    return [lo + k * step for k in range(count)]


def _name_list(valid, label):
    def parse(text: str) -> list[str]:
        names = [v.strip() for v in text.split(",") if v.strip()]
        if not names:
            raise argparse.ArgumentTypeError(f"empty {label} list")
        for name in names:
            if name not in valid:
                raise argparse.ArgumentTypeError(
                    f"unknown {label} {name!r}, expected one of {', '.join(valid)}")
        return names
    return parse


@contextlib.contextmanager
def _open_out(path: str):
    if path == "-":
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        yield fh


def _emit(out_path: str, manifest: RunManifest, command: str,
          header: list[str], rows: list[list]):
    body = io.StringIO()
    body.write(",".join(header) + "\n")
    for row in rows:
        body.write(",".join(_fmt(v) for v in row) + "\n")
    with _open_out(out_path) as fh:
        for line in manifest.comment_lines(command):
            fh.write(line + "\n")
        fh.write(body.getvalue())


def _resolve_gamma_th(args) -> float:
    if args.rate_th is not None:
        return analysis.gamma_th_from_rate(args.rate_th)
    return args.gamma_th


def _cmd_wcdf(args) -> int:
    config = {
        "n_list": args.n_list,
        "trials": args.trials,
        "thresholds": args.thresholds or "0:0.05:n",
        "threads": args.threads,
        "out": args.out,
    }
    manifest = _make_manifest(args.seed, config)
    rows = []
    for n in args.n_list:
        if args.thresholds:
            thresholds = args.thresholds
        else:
            thresholds = [0.05 * k for k in range(20 * n + 1)]
        est = engine.estimate_w_cdf(n, thresholds, args.trials, args.seed,
                                    threads=args.threads)
        for t, c in zip(est.thresholds, est.cdf):
            rows.append([n, t, c, est.trials])
    _emit(args.out, manifest, "wcdf", ["n", "threshold", "cdf", "trials"], rows)
    return EXIT_OK


def _cmd_bound(args) -> int:
    gamma_th = _resolve_gamma_th(args)
    config = {
        "n_list": args.n_list,
        "gamma_th": gamma_th,
        "rho_db": args.rho_db,
        "methods": args.methods,
        "trials": args.trials,
        "threads": args.threads,
        "out": args.out,
    }
    manifest = _make_manifest(args.seed, config)
    quad = QuadratureSpec()
    rows = []
    for n in args.n_list:
        for rho_db in args.rho_db:
            params = analysis.BoundParams(n=n, gamma_th=gamma_th,
                                          rho=engine.db_to_linear(rho_db))
            for method in args.methods:
                if method == "printed":
                    bv = analysis.bound_printed(params)
                    raw = bv.raw
                elif method == "semi":
                    bv = analysis.bound_semi_analytic(params, quad)
                    raw = None
                elif method == "mc":
                    bv = analysis.bound_mc(params, args.trials, args.seed)
                    raw = None
                else:
                    bv = analysis.asymptotic_bound(params)
                    raw = None
                rows.append([n, rho_db, method, bv.probability, bv.stderr, raw])
    _emit(args.out, manifest, "bound",
          ["n", "rho_db", "method", "value", "stderr", "raw"], rows)
    return EXIT_OK


def _outage_curves(args, gamma_th: float) -> dict[tuple[int, str], engine.OutageCurve]:
    curves = {}
    for n in args.n_list:
        for scheme in args.schemes:
            cfg = engine.SweepConfig(n=n, scheme=scheme, gamma_th=gamma_th,
                                     rho_grid_db=tuple(args.rho_db),
                                     trials=args.trials, master_seed=args.seed)
            curves[(n, scheme)] = engine.estimate_outage(cfg, threads=args.threads)
    return curves


def _cmd_outage(args) -> int:
    gamma_th = _resolve_gamma_th(args)
    config = {
        "n_list": args.n_list,
        "schemes": args.schemes,
        "gamma_th": gamma_th,
        "rho_db": args.rho_db,
        "trials": args.trials,
        "threads": args.threads,
        "out": args.out,
    }
    manifest = _make_manifest(args.seed, config)
    curves = _outage_curves(args, gamma_th)
    rows = []
    for n in args.n_list:
        for scheme in args.schemes:
            for pt in curves[(n, scheme)].points:
                rows.append([n, scheme, pt.rho_db, pt.outage, pt.stderr, pt.trials])
    _emit(args.out, manifest, "outage",
          ["n", "scheme", "rho_db", "outage", "stderr", "trials"], rows)
    return EXIT_OK


def _cmd_gap(args) -> int:
    gamma_th = _resolve_gamma_th(args)
    config = {
        "n_list": args.n_list,
        "schemes": args.schemes,
        "gamma_th": gamma_th,
        "rho_db": args.rho_db,
        "trials": args.trials,
        "target_outage": args.target_outage,
        "threads": args.threads,
        "out": args.out,
    }
    manifest = _make_manifest(args.seed, config)
    curves = _outage_curves(args, gamma_th)
    results = {}
    for n in args.n_list:
        required = {}
        for scheme in args.schemes:
            try:
                required[scheme] = engine.required_snr_at(curves[(n, scheme)],
                                                          args.target_outage)
            except TargetOutOfRangeError as exc:
                raise TargetOutOfRangeError(
                    f"n={n}, scheme={scheme}: {exc}") from exc
        gaps = {}
        for i, first in enumerate(args.schemes):
            for second in args.schemes[i + 1:]:
                gaps[f"{second}_minus_{first}"] = required[second] - required[first]
        results[str(n)] = {"required_snr_db": required, "gaps_db": gaps}
    report = {
        "manifest": manifest.to_dict(),
        "target_outage": args.target_outage,
        "results": results,
    }
    with _open_out(args.out) as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twrelay",
        description="Two-way AF relay beamforming: outage Monte Carlo and closed-form bounds.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=42, help="master seed (default 42)")
        p.add_argument("--threads", type=int, default=0,
                       help="worker threads, 0 = auto; never affects results")
        p.add_argument("--out", default="-", help="output path (default stdout)")

    p = sub.add_parser("wcdf", help="empirical CDF of the combining statistic w")
    p.add_argument("--n-list", type=_int_list, required=True)
    p.add_argument("--trials", type=_positive_int, default=100_000)
    p.add_argument("--thresholds", type=_grid_spec, default=None,
                   help="lo:step:hi grid (default 0:0.05:n per n)")
    common(p)
    p.set_defaults(func=_cmd_wcdf)

    p = sub.add_parser("bound", help="outage upper bound by the analytic and MC routes")
    p.add_argument("--n-list", type=_int_list, required=True)
    thr = p.add_mutually_exclusive_group()
    thr.add_argument("--gamma-th", type=_positive_float, default=1.0,
                     help="linear SNR threshold (default 1.0)")
    thr.add_argument("--rate-th", type=_positive_float, default=None,
                     help="rate threshold; gamma_th = 2^(2R) - 1")
    p.add_argument("--rho-db", type=_grid_spec, required=True, help="lo:step:hi in dB")
    p.add_argument("--methods", type=_name_list(BOUND_METHODS, "method"),
                   default=["printed", "semi", "asymptotic"])
    p.add_argument("--trials", type=_positive_int, default=1_000_000,
                   help="trials for the mc method")
    common(p)
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("outage", help="Monte-Carlo outage per scheme")
    p.add_argument("--n-list", type=_int_list, required=True)
    p.add_argument("--schemes", type=_name_list(SCHEMES, "scheme"),
                   default=list(SCHEMES))
    thr = p.add_mutually_exclusive_group()
    thr.add_argument("--gamma-th", type=_positive_float, default=1.0)
    thr.add_argument("--rate-th", type=_positive_float, default=None)
    p.add_argument("--rho-db", type=_grid_spec, required=True)
    p.add_argument("--trials", type=_positive_int, default=100_000)
    common(p)
    p.set_defaults(func=_cmd_outage)

    p = sub.add_parser("gap", help="required-SNR comparison between schemes")
    p.add_argument("--n-list", type=_int_list, required=True)
    p.add_argument("--schemes", type=_name_list(SCHEMES, "scheme"),
                   default=["proposed", "selection"])
    thr = p.add_mutually_exclusive_group()
    thr.add_argument("--gamma-th", type=_positive_float, default=1.0)
    thr.add_argument("--rate-th", type=_positive_float, default=None)
    p.add_argument("--rho-db", type=_grid_spec, required=True)
    p.add_argument("--trials", type=_positive_int, default=100_000)
    p.add_argument("--target-outage", type=_positive_float, required=True)
    common(p)
    p.set_defaults(func=_cmd_gap)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"twrelay: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConvergenceError as exc:
        print(f"twrelay: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (TargetOutOfRangeError, InsufficientDataError) as exc:
        print(f"twrelay: {exc}", file=sys.stderr)
        return EXIT_RANGE


if __name__ == "__main__":
    sys.exit(main())
