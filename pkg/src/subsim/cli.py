"""Command-line entry point: ``subsim <command> ...``."""
from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path

from subsim import experiments as ex
from subsim.config import ConfigError, load_config
from subsim.graph import GraphError, compute_metrics, read_edgelist, write_edgelist
from subsim.stats import summaries_to_csv
from subsim.topology import TopologyParams, default_subscriptions, generate

log = logging.getLogger("subsim")


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    log.info("wrote %s", path)


def _metrics_csv(row: dict) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(row), lineterminator="\n")
    w.writeheader()
    w.writerow({k: f"{v:.6g}" if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


def cmd_gen(args) -> int:
    k = args.k if args.k is not None else default_subscriptions(args.n)
    params = TopologyParams(
        kind=args.kind, n=args.n, k=k, mu=args.mu, p_rewire=args.p_rewire,
        p_invert=args.p_invert, seed=args.seed, ke_offset=args.ke_offset,
    )
    g = generate(params)
    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    write_edgelist(g, prefix.with_name(prefix.name + ".edges"))
    sources = -1 if args.sources is None else (None if args.sources == 0 else args.sources)
    m = compute_metrics(g, sources=sources, seed=args.seed)
    row = {"kind": params.kind, "n": params.n, "k": params.k, "mu": params.mu,
           "p_rewire": params.p_rewire, "p_invert": params.p_invert, "seed": params.seed, **m.row()}
    _write(prefix.with_name(prefix.name + ".metrics.csv"), _metrics_csv(row))
    return 0


def cmd_metrics(args) -> int:
    g = read_edgelist(args.graph)
    sources = -1 if args.sources is None else (None if args.sources == 0 else args.sources)
    text = _metrics_csv(compute_metrics(g, sources=sources, seed=args.seed).row())
    if args.out:
        _write(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    results = ex.replicate(cfg, args.runs, args.seed, args.jobs)
    prefix = Path(args.out)
    for i, r in enumerate(results):
        _write(prefix.with_name(f"{prefix.name}.run{i:03d}.csv"), r.to_csv())
    inc, load = ex.summarize_results(results)
    _write(prefix.with_name(prefix.name + ".summary.csv"), summaries_to_csv([inc, load]))
    print(f"inconsistent: mean {inc.mean:.4g} +/- {inc.ci95:.3g}   load: {load.mean:.4g} +/- {load.ci95:.3g}")
    return 0


def _write_sweep(res: ex.SweepResult, path: Path) -> None:
    _write(path, res.to_csv())
    print(f"{path}: best {res.axis} = {res.best:g}")


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    spec = ex.ExperimentSpec(cfg, args.axis, tuple(_floats(args.values)), args.runs, args.seed)
    res = ex.run_sweep(spec, jobs=args.jobs, progress=True)
    _write_sweep(res, Path(args.out + ".sweep.csv"))
    return 0


def cmd_figure1(args) -> int:
    grid = _floats(args.mus) if args.mus else ex.FIG1_MU_GRID
    rows = ex.figure1(args.n, args.k, args.p_invert, grid, range(args.seed, args.seed + args.runs),
                      args.sources, args.ke_offset, args.jobs)
    _write(Path(args.out + ".fig1.csv"), ex.metrics_to_csv("mu", rows))
    return 0


def cmd_figure2(args) -> int:
    grid = _floats(args.inverts) if args.inverts else ex.FIG2_INVERT_GRID
    rows = ex.figure2(args.n, args.k, args.mu, grid, range(args.seed, args.seed + args.runs),
                      args.sources, args.ke_offset, args.jobs)
    _write(Path(args.out + ".fig2.csv"), ex.metrics_to_csv("p_invert", rows))
    return 0


def cmd_figure3(args) -> int:
    grid = _floats(args.mus) if args.mus else ex.FIG3_MU_GRID
    for n in _ints(args.n):
        if n >= 100_000:
            log.warning("n=%d is a long-running configuration", n)
        for rate in _floats(args.rate):
            res = ex.figure3(
                jobs=args.jobs, n=n, rate_pct=rate, runs=args.runs, duration_s=args.duration,
                mu_grid=grid, master_seed=args.seed,
            )
            _write_sweep(res, Path(f"{args.out}.fig3.n{n}.rate{rate:g}.csv"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--seed", type=int, default=0, help="generator or master seed")
    shared.add_argument("--out", default="out/run", help="output path prefix")
    shared.add_argument("--runs", type=int, default=10, help="replications / seeds")
    shared.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    shared.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="subsim", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[shared], help="generate a topology and its metrics")
    g.add_argument("--kind", required=True, choices=("sw", "sf", "ke", "random"))
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, help="subscriptions per node (default round(sqrt n))")
    g.add_argument("--mu", type=float, default=0.0)
    g.add_argument("--p-rewire", type=float, default=0.1)
    g.add_argument("--p-invert", type=float, default=0.15)
    g.add_argument("--ke-offset", type=float)
    g.add_argument("--sources", type=int, help="BFS roots for path length (0 = exact)")
    g.set_defaults(func=cmd_gen)

    m = sub.add_parser("metrics", parents=[shared], help="metrics of an edge-list file")
    m.add_argument("--graph", required=True)
    m.add_argument("--sources", type=int, help="BFS roots for path length (0 = exact)")
    m.set_defaults(func=cmd_metrics, out=None)

    s = sub.add_parser("simulate", parents=[shared], help="replicate one configuration")
    s.add_argument("--config", required=True)
    s.set_defaults(func=cmd_simulate)

    w = sub.add_parser("sweep", parents=[shared], help="sweep one parameter of a configuration")
    w.add_argument("--config", required=True)
    w.add_argument("--axis", required=True, choices=ex.AXES)
    w.add_argument("--values", required=True, help="comma-separated grid")
    w.set_defaults(func=cmd_sweep)

    f1 = sub.add_parser("figure1", parents=[shared], help="path length / transitivity vs mu")
    f1.add_argument("--n", type=int, default=10_000)
    f1.add_argument("--k", type=int, default=20)
    f1.add_argument("--p-invert", type=float, default=0.15)
    f1.add_argument("--mus", help="comma-separated mu grid (default log-spaced 1e-4..1)")
    f1.add_argument("--sources", type=int)
    f1.add_argument("--ke-offset", type=float)
    f1.set_defaults(func=cmd_figure1, runs=5)

    f2 = sub.add_parser("figure2", parents=[shared], help="path length / transitivity vs inversion")
    f2.add_argument("--n", type=int, default=10_000)
    f2.add_argument("--k", type=int, default=20)
    f2.add_argument("--mu", type=float, default=1.0)
    f2.add_argument("--inverts", help="comma-separated inversion grid (default 0..1 step 0.1)")
    f2.add_argument("--sources", type=int)
    f2.add_argument("--ke-offset", type=float)
    f2.set_defaults(func=cmd_figure2, runs=5)

    f3 = sub.add_parser("figure3", parents=[shared], help="simulated mu sweep")
    f3.add_argument("--n", default="1000", help="comma-separated node counts")
    f3.add_argument("--rate", default="1", help="comma-separated change rates, %% per minute")
    f3.add_argument("--duration", type=float, default=3600.0)
    f3.add_argument("--mus", help="comma-separated mu grid (default 0..1 step 0.1)")
    f3.set_defaults(func=cmd_figure3)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, GraphError, ValueError, OSError) as exc:
        print(f"subsim {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
