"""Command-line front end: ``secnoma {rate,region,oracle,bench}``.

Exit status is 0 on success, 2 on bad input and 3 when a grid guard trips.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .linalg import as_matrix
from .oracle import GridGuardError, GridSpec, grid_oracle_region
from .precoder import SolveOptions, optimize_wiretap
from .rates import ChannelPair, Order, rate_pair
from .region import RateRegion, SweepConfig, sweep

log = logging.getLogger(__name__)

EXIT_INPUT = 2
EXIT_GUARD = 3

CHANNEL_FIELDS = {"H1", "H2", "P", "sigma", "seed"}


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class ChannelFile:
    H1: np.ndarray
    H2: np.ndarray
    P: float
    sigma: float = 0.05
    seed: int = 0

    @property
    def channels(self) -> ChannelPair:
        return ChannelPair(self.H1, self.H2)


def _matrix_field(data, name: str) -> np.ndarray:
    value = data[name]
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise InputError(f"{name} must be an array of arrays")
    if len({len(r) for r in value}) != 1:
        raise InputError(f"{name} is not rectangular")
    if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for r in value for x in r):
        raise InputError(f"{name} must contain only numbers")
    try:
        return as_matrix(value, name)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def read_channel_file(path) -> ChannelFile:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read channel file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise InputError("channel file must hold an object with fields H1, H2, P")
    unknown = set(data) - CHANNEL_FIELDS
    if unknown:
        raise InputError(f"unknown field(s) in channel file: {', '.join(sorted(unknown))}")
    missing = {"H1", "H2", "P"} - set(data)
    if missing:
        raise InputError(f"missing field(s) in channel file: {', '.join(sorted(missing))}")
    h1, h2 = _matrix_field(data, "H1"), _matrix_field(data, "H2")
    if h1.shape[1] != h2.shape[1]:
        raise InputError(f"H1 and H2 column counts differ ({h1.shape[1]} vs {h2.shape[1]})")
    P = data["P"]
    sigma = data.get("sigma", 0.05)
    seed = data.get("seed", 0)
    for name, v in (("P", P), ("sigma", sigma)):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise InputError(f"{name} must be a finite number")
    if P < 0:
        raise InputError("P must be non-negative")
    if not 0 < sigma <= 1:
        raise InputError("sigma must lie in (0, 1]")
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise InputError("seed must be a non-negative 64-bit integer")
    return ChannelFile(h1, h2, float(P), float(sigma), seed)


def write_channel_file(path, cf: ChannelFile) -> None:
    data = {"H1": cf.H1.tolist(), "H2": cf.H2.tolist(), "P": cf.P, "sigma": cf.sigma, "seed": cf.seed}
    Path(path).write_text(json.dumps(data, indent=2) + "\n")


def read_matrix_file(path, name: str = "Q") -> np.ndarray:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {name} file {path}: {exc}") from None
    return _matrix_field({name: data}, name)


def fmt(x: float) -> str:
    """Shortest round-trip decimal, positional below 1e6."""
    x = float(x) + 0.0  # drops a negative zero
    if abs(x) >= 1e6:
        return repr(x)
    return np.format_float_positional(x, unique=True, trim="-")


def region_csv(points) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["alpha", "order", "R1_bits", "R2_bits"])
    for p in points:
        w.writerow([fmt(p.alpha), p.order.value, fmt(p.R1), fmt(p.R2)])
    return buf.getvalue()


def hull_csv(region: RateRegion) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["R1_bits", "R2_bits"])
    for r1, r2 in region.hull_vertices:
        w.writerow([fmt(r1), fmt(r2)])
    return buf.getvalue()


def _orders(value: str) -> tuple[Order, ...]:
    if value == "both":
        return (Order.ORDER12, Order.ORDER21)
    return (Order.parse(value),)


def cmd_rate(args) -> int:
    cf = read_channel_file(args.channel_file)
    q1 = read_matrix_file(args.q1_file, "Q1")
    q2 = read_matrix_file(args.q2_file, "Q2")
    try:
        point = rate_pair(cf.channels, q1, q2, order=args.order)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    print(f"R1={point.R1:.6f} R2={point.R2:.6f}")
    return 0


def cmd_region(args) -> int:
    cf = read_channel_file(args.channel_file)
    opts = SolveOptions(restarts=args.restarts, seed=cf.seed)
    config = SweepConfig(cf.P, cf.sigma, _orders(args.orders), opts)
    result = sweep(cf.channels, config, max_workers=args.jobs)
    out = Path(args.out)
    try:
        out.write_text(region_csv(result.points))
        Path(f"{out}.hull.csv").write_text(hull_csv(result.region))
    except OSError as exc:
        raise InputError(f"cannot write output: {exc}") from None
    log.info("wrote %d points to %s", len(result.points), out)
    return 0


def cmd_oracle(args) -> int:
    cf = read_channel_file(args.channel_file)
    grid = GridSpec(angle_steps=args.grid, power_steps=args.grid)
    region = grid_oracle_region(cf.channels, cf.P, grid)
    text = hull_csv(region)
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            raise InputError(f"cannot write output: {exc}") from None
    else:
        sys.stdout.write(text)
    return 0


def bench_table(nt: int, n1_max: int, n2_max: int, power: float, trials: int, sigma: float = 0.05,
                seed: int = 0, opts: SolveOptions | None = None) -> np.ndarray:
    """Mean wall time (ms) of one full sweep per (n1, n2) cell, rows n1 and columns n2."""
    opts = opts or SolveOptions(seed=seed)
    config = SweepConfig(power, sigma, solve_opts=opts)
    table = np.zeros((n1_max, n2_max))
    # load the compiled kernels before the clock starts
    optimize_wiretap(np.ones((1, nt)), np.zeros((1, nt)), 1.0, SolveOptions(restarts=1))
    for n1 in range(1, n1_max + 1):
        for n2 in range(1, n2_max + 1):
            elapsed = 0.0
            for t in range(trials):
                rng = np.random.default_rng([seed, nt, n1, n2, t])
                ch = ChannelPair(rng.uniform(0, 1, (n1, nt)), rng.uniform(0, 1, (n2, nt)))
                t0 = time.perf_counter()
                sweep(ch, config)
                elapsed += time.perf_counter() - t0
            table[n1 - 1, n2 - 1] = 1e3 * elapsed / trials
            log.info("bench n1=%d n2=%d: %.1f ms", n1, n2, table[n1 - 1, n2 - 1])
    return table


def format_bench(table: np.ndarray, nt: int, power: float, trials: int) -> str:
    n1_max, n2_max = table.shape
    lines = [f"Execution time (ms) for nt={nt} and P={fmt(power)}, mean of {trials} trial(s)"]
    lines.append("n1\\n2 " + "".join(f"{n2:>10d}" for n2 in range(1, n2_max + 1)))
    for n1 in range(1, n1_max + 1):
        lines.append(f"{n1:<6d}" + "".join(f"{v:>10.1f}" for v in table[n1 - 1]))
    return "\n".join(lines) + "\n"


def cmd_bench(args) -> int:
    if min(args.nt, args.n1_max, args.n2_max, args.trials) < 1:
        raise InputError("dimensions and trials must be >= 1")
    if args.power < 0 or not 0 < args.sigma <= 1:
        raise InputError("power must be >= 0 and sigma in (0, 1]")
    table = bench_table(args.nt, args.n1_max, args.n2_max, args.power, args.trials, args.sigma, args.seed,
                        SolveOptions(restarts=args.restarts, seed=args.seed))
    sys.stdout.write(format_bench(table, args.nt, args.power, args.trials))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="secnoma", description="Secrecy rate regions for two-user MIMO-NOMA.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rate", help="evaluate (R1, R2) for given covariances")
    p.add_argument("channel_file")
    p.add_argument("q1_file")
    p.add_argument("q2_file")
    p.add_argument("--order", choices=["12", "21"], default="12", help="user designed first (default 12)")
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("region", help="sweep alpha and write the rate points and hull as CSV")
    p.add_argument("channel_file")
    p.add_argument("--orders", choices=["both", "12", "21"], default="both")
    p.add_argument("--out", required=True, help="points CSV; the hull goes to <out>.hull.csv")
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--jobs", type=int, default=None, help="worker processes for the sweep")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("oracle", help="brute-force grid region (nt <= 2)")
    p.add_argument("channel_file")
    p.add_argument("--grid", type=int, default=12, help="steps per angle and per power simplex")
    p.add_argument("--out", default=None, help="hull CSV path (default: stdout)")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="time full sweeps on random channels")
    p.add_argument("--nt", type=int, default=2)
    p.add_argument("--n1-max", type=int, default=5)
    p.add_argument("--n2-max", type=int, default=5)
    p.add_argument("--power", type=float, default=30.0)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--sigma", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=5)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except GridGuardError as exc:
        print(f"secnoma: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (InputError, ValueError) as exc:
        print(f"secnoma: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
