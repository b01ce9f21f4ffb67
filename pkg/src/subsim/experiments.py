"""Replicated runs, parameter sweeps and the figure presets.

Every (grid point, replication) cell is independent and owns its seeds, so
cells may run in any order or in parallel; results are assembled by index.
"""
from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from subsim.graph import DEFAULT_PATH_SOURCES, EXACT_PATH_LIMIT, average_path_length, transitivity
from subsim.simengine import GammaParams, RunResult, SimConfig, run_simulation
from subsim.stats import Summary, summarize_runs
from subsim.topology import TopologyParams, default_subscriptions, gen_ke

log = logging.getLogger(__name__)

AXES = ("mu", "p_invert", "rate_pct", "n")
FIG1_MU_GRID = tuple(float(f"{x:.12g}") for x in 10.0 ** np.linspace(-4, 0, 13))
FIG2_INVERT_GRID = tuple(round(0.1 * i, 10) for i in range(11))
FIG3_MU_GRID = tuple(round(0.1 * i, 10) for i in range(11))


def derive_seeds(master_seed: int, count: int) -> list[tuple[int, int]]:
    """(topology_seed, sim_seed) per replication, reproducible from ``master_seed``."""
    children = np.random.SeedSequence(master_seed).spawn(count)
    return [tuple(int(x) for x in c.generate_state(2, dtype=np.uint64)) for c in children]


def pmap(func: Callable, items: Sequence, jobs: int = 1) -> list:
    """Order-preserving map, optionally across worker processes."""
    if jobs <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


def rate_pct_of(cfg: SimConfig) -> float:
    return 60.0 / (cfg.gamma.mean_interval_s * cfg.topology.n) * 100.0


def with_seeds(cfg: SimConfig, seeds: tuple[int, int]) -> SimConfig:
    return replace(cfg, topology=replace(cfg.topology, seed=seeds[0]), sim_seed=seeds[1])


def replicate(cfg: SimConfig, runs: int, master_seed: int = 0, jobs: int = 1) -> list[RunResult]:
    if runs < 2:
        raise ValueError(f"need at least 2 runs for a summary, got {runs}")
    cells = [with_seeds(cfg, s) for s in derive_seeds(master_seed, runs)]
    return pmap(run_simulation, cells, jobs)


def summarize_results(results: Iterable[RunResult], label: str = "") -> tuple[Summary, Summary]:
    results = list(results)
    inc = summarize_runs([r.mean_inconsistent for r in results], label=f"{label}inconsistent")
    load = summarize_runs([r.mean_load for r in results], label=f"{label}load")
    return inc, load


# -- sweeps -----------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentSpec:
    base: SimConfig
    axis: str
    values: tuple[float, ...]
    runs: int = 10
    master_seed: int = 0

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        if self.runs < 2:
            raise ValueError(f"need at least 2 runs per grid point, got {self.runs}")
        if not self.values:
            raise ValueError("sweep grid is empty")
        for v in self.values:
            self.point_config(v)

    def point_config(self, value: float) -> SimConfig:
        base = self.base
        topo = base.topology
        if self.axis == "mu":
            return replace(base, topology=replace(topo, mu=float(value)))
        if self.axis == "p_invert":
            return replace(base, topology=replace(topo, p_invert=float(value)))
        if self.axis == "rate_pct":
            return replace(base, gamma=GammaParams.from_rate(float(value), topo.n, base.gamma.shape))
        n = int(value)
        rate = rate_pct_of(base)
        return replace(
            base,
            topology=replace(topo, n=n, k=default_subscriptions(n)),
            gamma=GammaParams.from_rate(rate, n, base.gamma.shape),
        )

    def cells(self) -> list[SimConfig]:
        seeds = derive_seeds(self.master_seed, self.runs)
        return [with_seeds(self.point_config(v), s) for v in self.values for s in seeds]


@dataclass(frozen=True)
class SweepRow:
    value: float
    inconsistency: Summary
    load: Summary


@dataclass(frozen=True)
class SweepResult:
    axis: str
    rows: tuple[SweepRow, ...]

    @property
    def best(self) -> float:
        """Grid value with the lowest mean inconsistency."""
        return min(self.rows, key=lambda r: r.inconsistency.mean).value

    def row_for(self, value: float) -> SweepRow:
        for r in self.rows:
            if abs(r.value - value) < 1e-12:
                return r
        raise KeyError(value)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(sweep_header(self.axis))
        best = self.best
        for r in self.rows:
            i, l = r.inconsistency, r.load
            w.writerow([
                f"{r.value:.6g}", i.count,
                *(f"{x:.6g}" for x in (i.mean, i.std, i.min, i.max, i.ci95,
                                       l.mean, l.std, l.min, l.max, l.ci95)),
                int(r.value == best),
            ])
        return buf.getvalue()


def sweep_header(axis: str) -> list[str]:
    stats = ("mean", "std", "min", "max", "ci95")
    return [axis, "runs", *(f"inc_{s}" for s in stats), *(f"load_{s}" for s in stats), "best"]


def read_sweep_csv(text: str) -> SweepResult:
    rows = list(csv.reader(io.StringIO(text)))
    axis = rows[0][0]
    if rows[0] != sweep_header(axis):
        raise ValueError(f"unexpected sweep header {rows[0]}")
    out = []
    for row in rows[1:]:
        value, runs = float(row[0]), int(row[1])
        nums = [float(x) for x in row[2:12]]
        out.append(SweepRow(
            value,
            Summary(runs, *nums[0:5], label="inconsistent"),
            Summary(runs, *nums[5:10], label="load"),
        ))
    return SweepResult(axis, tuple(out))


def _cell_stats(cfg: SimConfig) -> tuple[float, float]:
    r = run_simulation(cfg)
    return r.mean_inconsistent, r.mean_load


def run_sweep(spec: ExperimentSpec, jobs: int = 1, progress: bool = False) -> SweepResult:
    cells = spec.cells()
    if progress:
        log.info("sweep over %s: %d grid points x %d runs", spec.axis, len(spec.values), spec.runs)
    stats = pmap(_cell_stats, cells, jobs)
    rows = []
    for gi, v in enumerate(spec.values):
        chunk = stats[gi * spec.runs:(gi + 1) * spec.runs]
        rows.append(SweepRow(
            float(v),
            summarize_runs([c[0] for c in chunk], label="inconsistent"),
            summarize_runs([c[1] for c in chunk], label="load"),
        ))
    return SweepResult(spec.axis, tuple(rows))


# -- figure presets -----------------------------------------------------------

def _path_sources(n: int, sources: int | None) -> int | None:
    if sources is not None:
        return min(sources, n)
    return None if n <= EXACT_PATH_LIMIT else DEFAULT_PATH_SOURCES


def _ke_metrics(args) -> tuple[float, float, float]:
    n, k, mu, p_invert, seed, sources, offset = args
    g = gen_ke(n, k, mu, p_invert, seed, offset)
    pl = average_path_length(g, sources=_path_sources(n, sources), seed=seed)
    return pl.avg_path_length, pl.reachable_pair_fraction, transitivity(g)


@dataclass(frozen=True)
class MetricRow:
    value: float
    path_length: float
    transitivity: float
    reachable_fraction: float
    path_length_norm: float
    transitivity_norm: float


METRIC_FIELDS = ("path_length", "transitivity", "reachable_fraction", "path_length_norm", "transitivity_norm")


def metrics_to_csv(axis: str, rows: Sequence[MetricRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow((axis, *METRIC_FIELDS))
    for r in rows:
        w.writerow((f"{r.value:.6g}", *(f"{getattr(r, f):.6g}" for f in METRIC_FIELDS)))
    return buf.getvalue()


def read_metrics_csv(text: str) -> tuple[str, list[MetricRow]]:
    rows = list(csv.reader(io.StringIO(text)))
    if tuple(rows[0][1:]) != METRIC_FIELDS:
        raise ValueError(f"unexpected metrics header {rows[0]}")
    return rows[0][0], [MetricRow(*(float(x) for x in row)) for row in rows[1:]]


def _metric_sweep(points, n, k, seeds, sources, offset, jobs, vary: str, fixed: float) -> list[MetricRow]:
    cells = []
    for v in points:
        mu, p_inv = (v, fixed) if vary == "mu" else (fixed, v)
        cells.extend((n, k, mu, p_inv, s, sources, offset) for s in seeds)
    out = pmap(_ke_metrics, cells, jobs)
    per = len(seeds)
    means = []
    for gi, v in enumerate(points):
        chunk = np.array(out[gi * per:(gi + 1) * per])
        means.append((v, *chunk.mean(axis=0)))
    _, l0, _, t0 = means[0]
    return [
        MetricRow(v, l, t, frac, l / l0, t / t0 if t0 > 0 else float("nan"))
        for v, l, frac, t in means
    ]


def figure1(
    n: int = 10_000,
    k: int = 20,
    p_invert: float = 0.15,
    mu_grid: Sequence[float] = FIG1_MU_GRID,
    seeds: Sequence[int] = range(5),
    sources: int | None = None,
    offset: float | None = None,
    jobs: int = 1,
) -> list[MetricRow]:
    """Mean path length and transitivity of directed KE graphs across mu,
    raw and normalised by the smallest-mu point."""
    return _metric_sweep(sorted(mu_grid), n, k, list(seeds), sources, offset, jobs, "mu", p_invert)


def figure2(
    n: int = 10_000,
    k: int = 20,
    mu: float = 1.0,
    invert_grid: Sequence[float] = FIG2_INVERT_GRID,
    seeds: Sequence[int] = range(5),
    sources: int | None = None,
    offset: float | None = None,
    jobs: int = 1,
) -> list[MetricRow]:
    """Same metrics swept over the inversion probability at fixed mu."""
    return _metric_sweep(sorted(invert_grid), n, k, list(seeds), sources, offset, jobs, "p_invert", mu)


def figure3_spec(
    n: int = 1000,
    rate_pct: float = 1.0,
    runs: int = 10,
    duration_s: float = 3600.0,
    mu_grid: Sequence[float] = FIG3_MU_GRID,
    master_seed: int = 0,
    **sim_kwargs,
) -> ExperimentSpec:
    base = SimConfig(
        topology=TopologyParams("ke", n, default_subscriptions(n), mu=0.0),
        gamma=GammaParams.from_rate(rate_pct, n),
        protocol="transitive",
        duration_s=duration_s,
        **sim_kwargs,
    )
    return ExperimentSpec(base, "mu", tuple(mu_grid), runs, master_seed)


def figure3(jobs: int = 1, **kwargs) -> SweepResult:
    return run_sweep(figure3_spec(**kwargs), jobs=jobs, progress=True)
