"""Command-line front end: ``sweep``, ``verify`` and ``d0``.

Exit codes: 0 success, 1 usage or configuration error, 2 I/O error,
3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bounds
from .bounds import BoundPoint
from .channels import BscChannel, bsc_spectrum
from .distributions import FiniteDistribution
from .divergence import build_spectrum, d0_smooth
from .suites import SUITES, run_suite

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_VERIFY = 0, 1, 2, 3

CSV_COLUMNS = ("n", "method", "epsilon", "log2_m", "rate", "aux")


class ConfigError(ValueError):
    pass


@dataclass
class SweepConfig:
    crossover: float = 0.11
    epsilon: float = 1e-3
    n_values: list = field(default_factory=lambda: list(range(100, 2001, 100)))
    methods: tuple = bounds.METHODS
    mode: str = "exact"
    output_path: str | None = None
    format: str = "csv"
    eps_prime: float | None = None

    def validate(self) -> None:
        if not self.n_values:
            raise ConfigError("n list is empty")
        if any(n < 1 for n in self.n_values) or list(self.n_values) != sorted(set(self.n_values)):
            raise ConfigError("n values must be positive and strictly ascending")
        if not 0.0 < self.epsilon < 1.0:
            raise ConfigError("epsilon must lie in (0, 1)")
        if not 0.0 < self.crossover < 0.5:
            raise ConfigError("crossover must lie in (0, 0.5)")
        unknown = [m for m in self.methods if m not in bounds.METHODS]
        if unknown or not self.methods:
            raise ConfigError(f"unknown methods {unknown}; choose from {','.join(bounds.METHODS)}")
        if self.mode not in bounds.MODES:
            raise ConfigError("mode must be 'paper' or 'exact'")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be 'csv' or 'json'")
        if self.eps_prime is not None and not 0.0 <= self.eps_prime < self.epsilon:
            raise ConfigError("--eps-prime must lie in [0, epsilon)")


def parse_n_list(text: str) -> list[int]:
    """``"100,200,500"`` or ``"a:b:step"`` (inclusive of ``b``)."""
    try:
        if ":" in text:
            parts = [int(v) for v in text.split(":")]
            if len(parts) == 2:
                parts.append(1)
            a, b, step = parts
            if step < 1:
                raise ConfigError("step must be positive")
            return list(range(a, b + 1, step))
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse --n {text!r}: {exc}") from None


def _point(cfg: SweepConfig, n: int, method: str) -> BoundPoint:
    p, eps = cfg.crossover, cfg.epsilon
    if method == bounds.CONVERSE:
        return bounds.converse_bound(bsc_spectrum(BscChannel(n, p)), eps, n)
    if method == bounds.ACHIEVABILITY:
        return bounds.achievability_bound(
            bsc_spectrum(BscChannel(n, p)), eps, cfg.mode, n, eps_prime=cfg.eps_prime
        )
    if method == bounds.GALLAGER:
        return bounds.gallager_bsc(n, p, eps)
    if method == bounds.RCU:
        return bounds.rcu_bsc(n, p, eps)
    if method == bounds.DT:
        return bounds.dt_bsc(n, p, eps)
    return bounds.np_converse_bsc(BscChannel(n, p), eps)


def run_sweep(cfg: SweepConfig, jobs: int = 1) -> list[BoundPoint]:
    """Evaluate every (n, method) pair; rows come back in ascending n, fixed method order."""
    cfg.validate()
    tasks = [(n, m) for n in cfg.n_values for m in cfg.methods]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(lambda t: _point(cfg, *t), tasks))
    return [_point(cfg, *t) for t in tasks]


def _num(x: float) -> str:
    return repr(float(x))


def format_rows(points: list[BoundPoint], fmt: str) -> str:
    rows = [
        {
            "n": p.n,
            "method": p.method,
            "epsilon": float(p.epsilon),
            "log2_m": float(p.log2_m),
            "rate": float(p.rate),
            "aux": p.aux or "",
        }
        for p in points
    ]
    if fmt == "json":
        return json.dumps(rows, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([r["n"], r["method"], _num(r["epsilon"]), _num(r["log2_m"]), _num(r["rate"]), r["aux"]])
    return buf.getvalue()


def cmd_sweep(args) -> int:
    cfg = SweepConfig(
        crossover=args.crossover,
        epsilon=args.epsilon,
        n_values=parse_n_list(args.n) if args.n is not None else SweepConfig().n_values,
        methods=tuple(m.strip() for m in args.methods.split(",")) if args.methods else bounds.METHODS,
        mode=args.mode,
        output_path=args.out,
        format=args.format,
        eps_prime=args.eps_prime,
    )
    cfg.validate()
    text = format_rows(run_sweep(cfg, jobs=args.jobs), cfg.format)
    if cfg.output_path is None:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(cfg.output_path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"error: cannot write {cfg.output_path}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = run_suite(args.suite, seed=args.seed, trials=args.trials, workers=args.jobs)
    for c in checks:
        print(c.line())
    ok = all(c.passed for c in checks)
    print(f"{args.suite}: {'all checks passed' if ok else 'FAILED'}")
    return EXIT_OK if ok else EXIT_VERIFY


def read_vector(path: str) -> FiniteDistribution:
    """Whitespace-separated probabilities; errors name the offending line."""
    values = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            for tok in line.split():
                try:
                    values.append(float(tok))
                except ValueError:
                    raise ConfigError(f"{path}:{lineno}: not a number: {tok!r}") from None
    if not values:
        raise ConfigError(f"{path}: no probabilities found")
    try:
        return FiniteDistribution.from_probs(np.array(values))
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def cmd_d0(args) -> int:
    if not 0.0 <= args.delta <= 1.0:
        raise ConfigError("delta must lie in [0, 1]")
    try:
        p, q = read_vector(args.p_file), read_vector(args.q_file)
    except OSError as exc:
        print(f"error: {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    if p.alphabet_size != q.alphabet_size:
        raise ConfigError(f"length mismatch: {p.alphabet_size} vs {q.alphabet_size}")
    res = d0_smooth(build_spectrum(p, q), args.delta)
    print(f"value_bits {res.value:.6f}")
    print(f"boundary_log2_ratio {res.test.boundary_log_ratio:.6f}")
    print(f"gamma {res.test.gamma:.6f}")
    print(f"p_captured {res.p_captured:.6f}")
    return EXIT_OK


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="d0bounds", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sw = sub.add_parser("sweep", help="bound curves for the BSC")
    sw.add_argument("--crossover", type=float, default=0.11, help="BSC crossover probability")
    sw.add_argument("--epsilon", type=float, default=1e-3, help="target average error probability")
    sw.add_argument("--eps-prime", type=float, default=None, help="pin eps' of the achievability bound")
    sw.add_argument("--n", default=None, help="comma list or a:b:step (default 100:2000:100)")
    sw.add_argument("--methods", default=None, help=f"comma list from {','.join(bounds.METHODS)}")
    sw.add_argument("--mode", choices=bounds.MODES, default="exact", help="achievability form: unrounded or integer m")
    sw.add_argument("--format", choices=("csv", "json"), default="csv")
    sw.add_argument("--out", default=None, help="output file (default stdout)")
    sw.add_argument("--jobs", type=int, default=1, help="worker threads; output does not depend on it")
    sw.set_defaults(func=cmd_sweep)

    ve = sub.add_parser("verify", help="run property suites")
    ve.add_argument("suite", choices=SUITES + ("all",))
    ve.add_argument("--seed", type=_seed, default=42, help="master seed for every random suite")
    ve.add_argument("--trials", type=int, default=None, help="override the suite's trial count")
    ve.add_argument("--jobs", type=int, default=1, help="worker threads; output does not depend on it")
    ve.set_defaults(func=cmd_verify)

    dz = sub.add_parser("d0", help="smooth 0-divergence of two probability vectors")
    dz.add_argument("p_file", help="whitespace-separated probabilities of P")
    dz.add_argument("q_file", help="probabilities of Q on the same alphabet")
    dz.add_argument("--delta", type=float, default=0.0, help="smoothing parameter in [0, 1]")
    dz.set_defaults(func=cmd_d0)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
