"""Command-line entry point: ``generate``, ``build`` and ``bench``.

Exit codes: 0 on success, 1 when an enabled check fails, 2 on usage errors or
malformed input.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .files import (InputError, PointSetFile, dump_graph, dump_points, dump_points_csv,
                    dump_report, fmt, read_points)
from .generators import GENERATORS, generate
from .spanner import SpannerGraph, build_spanner
from .verify import emst_weight, fault_set_count, stretch_factor, verify_vfts
from .vfts import build_vfts

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    t: float = 2.0
    k: int = 0
    seed: int = 0
    n: int = 100
    dim: int = 2
    gen: str = "uniform"
    gen_params: dict = field(default_factory=dict)
    budget: int = 1_000_000

    def __post_init__(self):
        if not self.t > 1:
            raise InputError("t must be > 1")
        if self.k < 0:
            raise InputError("k must be >= 0")
        if self.n < 1:
            raise InputError("n must be >= 1")


def construct(points: np.ndarray, t: float, k: int) -> SpannerGraph:
    return build_spanner(points, t) if k == 0 else build_vfts(points, t, k)


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_generate(args) -> int:
    cfg = RunConfig(n=args.n, dim=args.dim, seed=args.seed, gen=args.gen)
    try:
        pts = generate(cfg.gen, cfg.n, cfg.dim, cfg.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    ps = PointSetFile(cfg.dim, pts)
    _emit(dump_points_csv(ps) if args.csv else dump_points(ps), args.out)
    return EXIT_OK


def build_report(g: SpannerGraph, pts: np.ndarray, cfg: RunConfig, verify: bool,
                 exhaustive: bool) -> dict:
    emst = emst_weight(pts)
    weight = g.weight(pts)
    report = {"n": g.n, "t": cfg.t, "k": cfg.k, "edge_count": g.edge_count,
              "max_degree": g.max_degree(), "weight": weight, "emst_weight": emst,
              "weight_ratio": weight / emst if emst > 0 else 1.0,
              "frame_size": g.meta.get("frame_size"), "params": g.meta.get("params"),
              "checks": {}}
    if verify or exhaustive:
        stretch, pair = stretch_factor(g, pts)
        report["stretch"] = stretch
        report["worst_pair"] = list(pair) if pair else None
        report["checks"]["stretch"] = bool(stretch <= cfg.t)
        if cfg.k > 0:
            budget = fault_set_count(g.n, cfg.k) if exhaustive else cfg.budget
            ok, info = verify_vfts(g, pts, cfg.t, cfg.k, budget, cfg.seed)
            report["vfts_ok"] = bool(ok)
            report["vfts_mode"] = info["mode"]
            report["vfts_stretch"] = info["stretch"]
            report["fault_sets_checked"] = info["checked"]
            report["worst_fault_set"] = info["fault_set"]
            report["checks"]["vfts"] = bool(ok)
    return report


def cmd_build(args) -> int:
    cfg = RunConfig(t=args.t, k=args.k, seed=args.seed, budget=args.budget)
    ps = read_points(args.input, as_csv=args.csv)
    g = construct(ps.points, cfg.t, cfg.k)
    report = build_report(g, ps.points, cfg, args.verify, args.verify_exhaustive)
    _emit(dump_graph(g), args.out)
    if args.report:
        _emit(dump_report(report), args.report)
    summary = [f"edges={g.edge_count}", f"max_degree={g.max_degree()}",
               f"weight_ratio={fmt(report['weight_ratio'])}"]
    if "stretch" in report:
        summary.append(f"stretch={fmt(report['stretch'])}")
    if "vfts_ok" in report:
        summary.append(f"vfts_ok={report['vfts_ok']} ({report['vfts_mode']})")
    print(" ".join(summary), file=sys.stderr)
    return EXIT_OK if all(report["checks"].values()) else EXIT_CHECK


BENCH_COLUMNS = ("n", "k", "t", "seed", "build_ms", "edges", "max_degree", "weight_ratio")


def bench_rows(gen: str, sizes, seeds, t: float, k: int, dim: int = 2):
    for seed in seeds:
        for n in sizes:
            pts = generate(gen, n, dim, seed)
            start = time.perf_counter()
            g = construct(pts, t, k)
            ms = 1000 * (time.perf_counter() - start)
            yield {"n": n, "k": k, "t": t, "seed": seed, "build_ms": ms,
                   "edges": g.edge_count, "max_degree": g.max_degree(),
                   "weight_ratio": g.weight(pts) / emst_weight(pts)}


def cmd_bench(args) -> int:
    RunConfig(t=args.t, k=args.k, dim=args.dim, gen=args.gen)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BENCH_COLUMNS)
    for row in bench_rows(args.gen, args.sizes, args.seeds, args.t, args.k, args.dim):
        writer.writerow([fmt(row[c]) for c in BENCH_COLUMNS])
        if args.out not in (None, "-"):
            print(" ".join(f"{c}={fmt(row[c])}" for c in BENCH_COLUMNS), file=sys.stderr)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ftspanner",
                                     description="Geometric and fault-tolerant spanners.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a point set")
    gen.add_argument("--gen", choices=sorted(GENERATORS), default="uniform")
    gen.add_argument("--n", type=int, default=100)
    gen.add_argument("--dim", type=int, default=2)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--csv", action="store_true", help="write CSV instead of JSON")
    gen.add_argument("--out", help="output path (default: stdout)")
    gen.set_defaults(func=cmd_generate)

    build = sub.add_parser("build", help="construct a spanner from a point file")
    build.add_argument("input")
    build.add_argument("--csv", action="store_true", help="input is CSV")
    build.add_argument("--t", type=float, default=2.0)
    build.add_argument("--k", type=int, default=0)
    build.add_argument("--seed", type=int, default=0, help="seed for sampled fault sets")
    build.add_argument("--verify", action="store_true",
                       help="check stretch, and fault tolerance within --budget")
    build.add_argument("--verify-exhaustive", action="store_true",
                       help="check every fault set of size <= k")
    build.add_argument("--budget", type=int, default=1_000_000)
    build.add_argument("--out", help="graph JSON path (default: stdout)")
    build.add_argument("--report", help="report JSON path")
    build.set_defaults(func=cmd_build)

    bench = sub.add_parser("bench", help="time constructions over a size grid")
    bench.add_argument("--gen", choices=sorted(GENERATORS), default="uniform")
    bench.add_argument("--sizes", type=int, nargs="+", default=[1024, 2048])
    bench.add_argument("--seeds", type=int, nargs="+", default=[0])
    bench.add_argument("--dim", type=int, default=2)
    bench.add_argument("--t", type=float, default=2.0)
    bench.add_argument("--k", type=int, default=0)
    bench.add_argument("--out", help="CSV path (default: stdout)")
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
