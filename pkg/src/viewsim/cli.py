"""Command-line entry points: budget sweeps, scaling bench, session server."""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .experiments import ExperimentConfig, fit_nlogn, run_scaling_bench, run_sweep


def _parse_sizes(spec: str) -> list[tuple[int, int]]:
    """Parse "150..600:150" (range) or "150,300,450" (list) into square sizes."""
    values: list[int] = []
    if ".." in spec:
        span, _, step = spec.partition(":")
        lo, _, hi = span.partition("..")
        if not (lo and hi and step):
            raise ValueError(f"expected LOW..HIGH:STEP, got {spec!r}")
        values = list(range(int(lo), int(hi) + 1, int(step)))
    else:
        values = [int(v) for v in spec.split(",") if v]
    if not values:
        raise ValueError(f"no sizes in {spec!r}")
    return [(v, v) for v in values]


def _cmd_run_sweep(args: argparse.Namespace) -> int:
    if args.config:
        config = ExperimentConfig.from_file(args.config)
    else:
        config = ExperimentConfig()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if overrides:
        config = ExperimentConfig.from_dict({**config.to_dict(), **overrides})
    report = run_sweep(config)
    report.to_csv(args.out)
    for cell in report.infeasible:
        print(f"infeasible (below ladder floor), skipped: {cell}", file=sys.stderr)
    print(f"wrote {args.out}")
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    sizes = _parse_sizes(args.sizes)
    rows = run_scaling_bench(sizes, seed=args.seed)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["n_sites", "cameras_per_site", "n_streams", "wall_seconds", "op_count"]
        )
        writer.writeheader()
        writer.writerows(rows)
    coeff, r2 = fit_nlogn([r["n_streams"] for r in rows], [r["op_count"] for r in rows])
    print(f"wrote {args.out}")
    print(f"op_count ~ {coeff:.3f} * n log2 n (R^2 = {r2:.5f})")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level=args.log_level)
    return 0


def _cmd_export_config(args: argparse.Namespace) -> int:
    json.dump(ExperimentConfig().to_dict(), sys.stdout, indent=2)
    print()
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="viewsim",
        description="View-aware bandwidth adaptation simulator for multi-camera rooms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("run-sweep", help="run the budget sweep and write metrics CSV")
    sweep.add_argument("--config", help="JSON config file (see default-config)")
    sweep.add_argument("--out", required=True, help="output CSV path")
    sweep.add_argument("--seed", type=int, help="override config seed")
    sweep.add_argument("--trials", type=int, help="override config trials")
    sweep.set_defaults(func=_cmd_run_sweep)

    bench = sub.add_parser("bench", help="time the solver on growing synthetic instances")
    bench.add_argument("--sizes", default="150..600:150", help='"LOW..HIGH:STEP" or "A,B,C"')
    bench.add_argument("--out", required=True, help="output CSV path")
    bench.add_argument("--seed", type=int, default=0)
    bench.set_defaults(func=_cmd_bench)

    serve = sub.add_parser("serve", help="start the session server")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--log-level", default="info")
    serve.set_defaults(func=_cmd_serve)

    default_config = sub.add_parser("default-config", help="print the default sweep config JSON")
    default_config.set_defaults(func=_cmd_export_config)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
