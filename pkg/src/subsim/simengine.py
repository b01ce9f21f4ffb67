"""Discrete-event simulation of aliveness monitoring over a subscription graph.

Nodes toggle between alive and dead at gamma-distributed intervals. Each node
keeps a timestamped belief about every node it watches. Two update protocols:

``direct``
    the changed node pushes a notification to each subscriber, delivered after
    a fixed latency.
``transitive``
    every alive node periodically polls random subscriptions; a successful poll
    returns the target's own state plus its beliefs about commonly watched
    nodes, and the poller keeps whichever information is newer.

Once per probe interval the engine records how many nodes hold at least one
wrong belief and how many packets the nodes handled in that interval.
"""
from __future__ import annotations

import csv
import heapq
import io
import math
import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from subsim.graph import DirectedGraph
from subsim.topology import TopologyParams, generate

PROTOCOLS = ("direct", "transitive")
PROBE_HEADER = ("t", "inconsistent", "total_packets", "mean_node_packets", "max_node_packets")

_CHANGE, _DELIVER, _POLL = 0, 1, 2


@dataclass(frozen=True)
class GammaParams:
    """Inter-change interval distribution, parameterised by its mean."""

    mean_interval_s: float
    shape: float = 2.0

    def __post_init__(self):
        if not self.mean_interval_s > 0 or not self.shape > 0:
            raise ValueError("gamma shape and mean interval must be positive")

    @classmethod
    def from_rate(cls, rate_pct: float, n: int, shape: float = 2.0) -> "GammaParams":
        """``rate_pct`` percent of ``n`` nodes change state per minute on average."""
        if not rate_pct > 0 or n < 1:
            raise ValueError(f"need rate_pct > 0 and n >= 1, got {rate_pct}, {n}")
        return cls(60.0 / ((rate_pct / 100.0) * n), shape)

    @property
    def scale(self) -> float:
        return self.mean_interval_s / self.shape

    @property
    def variance(self) -> float:
        return self.shape * self.scale ** 2


def sample_gamma_interval(params: GammaParams, rng: random.Random) -> float:
    return rng.gammavariate(params.shape, params.scale)


@dataclass(frozen=True)
class SimConfig:
    topology: TopologyParams
    gamma: GammaParams
    protocol: str = "transitive"
    duration_s: float = 3600.0
    probe_interval_s: float = 1.0
    direct_latency_s: float = 0.1
    poll_period_s: float = 1.0
    poll_fanout: int = 1
    sim_seed: int = 0

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"protocol must be one of {PROTOCOLS}, got {self.protocol!r}")
        if not self.duration_s > 0:
            raise ValueError(f"duration_s must be positive, got {self.duration_s}")
        if not self.probe_interval_s > 0:
            raise ValueError(f"probe_interval_s must be positive, got {self.probe_interval_s}")
        if self.direct_latency_s < 0:
            raise ValueError("direct_latency_s must be >= 0")
        if not self.poll_period_s > 0:
            raise ValueError("poll_period_s must be positive")
        if not 1 <= self.poll_fanout <= self.topology.k:
            raise ValueError(f"poll_fanout must be in [1, k={self.topology.k}], got {self.poll_fanout}")

    @property
    def probe_count(self) -> int:
        # Tolerate float noise such as 3600 / 0.1.
        return int(math.floor(self.duration_s / self.probe_interval_s + 1e-9))


@dataclass(frozen=True, slots=True)
class ProbeRecord:
    t: float
    inconsistent_count: int
    total_packets: int
    max_node_packets: int
    mean_node_packets: float


@dataclass
class RunResult:
    config: SimConfig
    probes: list[ProbeRecord]
    state_changes: int = 0

    @property
    def seeds(self) -> tuple[int, int]:
        return self.config.topology.seed, self.config.sim_seed

    @property
    def mean_inconsistent(self) -> float:
        return sum(p.inconsistent_count for p in self.probes) / len(self.probes)

    @property
    def max_inconsistent(self) -> int:
        return max(p.inconsistent_count for p in self.probes)

    @property
    def min_inconsistent(self) -> int:
        return min(p.inconsistent_count for p in self.probes)

    @property
    def mean_load(self) -> float:
        """Packets handled per node per second, averaged over the run."""
        per_interval = sum(p.mean_node_packets for p in self.probes) / len(self.probes)
        return per_interval / self.config.probe_interval_s

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(PROBE_HEADER)
        for p in self.probes:
            w.writerow((
                f"{p.t:.6g}",
                p.inconsistent_count,
                p.total_packets,
                f"{p.mean_node_packets:.6g}",
                p.max_node_packets,
            ))
        return buf.getvalue()

    def write_csv(self, path) -> None:
        Path(path).write_text(self.to_csv())


def read_probe_csv(path) -> list[ProbeRecord]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if tuple(rows[0]) != PROBE_HEADER:
        raise ValueError(f"{path}: unexpected header {rows[0]}")
    return [
        ProbeRecord(float(t), int(inc), int(tot), int(mx), float(mean))
        for t, inc, tot, mean, mx in rows[1:]
    ]


def _stream_seeds(sim_seed: int, count: int) -> list[int]:
    ss = np.random.SeedSequence(sim_seed)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in ss.spawn(count)]


class Simulation:
    """Mutable world state plus the event loop for one run.

    Construct directly to drive a fixture graph event by event; ``run`` plays
    the full configured scenario.
    """

    def __init__(self, graph: DirectedGraph, config: SimConfig, trace: bool = False):
        self.graph = graph
        self.config = config
        n = graph.node_count
        self.n = n
        self.out = graph.out_adjacency
        self.ins = graph.in_adjacency
        self._out_sets = [frozenset(t) for t in self.out]
        self._shared: list[list[tuple[int, ...] | None]] = [[None] * len(t) for t in self.out]
        self._index = [{v: i for i, v in enumerate(t)} for t in self.out]

        self.alive = [True] * n
        self.belief_alive = [dict.fromkeys(t, True) for t in self.out]
        self.belief_ts = [dict.fromkeys(t, 0.0) for t in self.out]
        self.wrong = [0] * n
        self.inconsistent = 0
        self.packets = [0] * n

        self.now = 0.0
        self._queue: list[tuple] = []
        self._seq = 0
        self.state_changes = 0
        change_seed, poll_seed = _stream_seeds(config.sim_seed, 2)
        self.change_rng = random.Random(change_seed)
        self.poll_rng = random.Random(poll_seed)
        # (t, node, packets) per packet accounting step when tracing.
        self.trace: list[tuple[float, int, int]] | None = [] if trace else None

    # -- queue -------------------------------------------------------------

    def schedule(self, t: float, kind: int, *args) -> None:
        self._seq += 1
        heapq.heappush(self._queue, (t, self._seq, kind, args))

    def pending(self) -> list[tuple]:
        return sorted(self._queue)

    def _count(self, node: int, k: int = 1) -> None:
        self.packets[node] += k
        if self.trace is not None:
            self.trace.append((self.now, node, k))

    # -- beliefs -----------------------------------------------------------

    def set_belief(self, u: int, w: int, value: bool, ts: float) -> None:
        self.belief_ts[u][w] = ts
        beliefs = self.belief_alive[u]
        if beliefs[w] == value:
            return
        beliefs[w] = value
        if value == self.alive[w]:
            self.wrong[u] -= 1
            if self.wrong[u] == 0:
                self.inconsistent -= 1
        else:
            self.wrong[u] += 1
            if self.wrong[u] == 1:
                self.inconsistent += 1

    def shared_watch(self, u: int, i: int) -> tuple[int, ...]:
        """Nodes watched by both ``u`` and its ``i``-th subscription."""
        s = self._shared[u][i]
        if s is None:
            vs = self._out_sets[self.out[u][i]]
            s = tuple(w for w in self.out[u] if w in vs)
            self._shared[u][i] = s
        return s

    # -- operations --------------------------------------------------------

    def apply_state_change(self, node: int, t: float) -> None:
        """Toggle ``node`` and, under the direct protocol, notify its subscribers."""
        self.now = t
        self.state_changes += 1
        value = not self.alive[node]
        self.alive[node] = value
        belief_alive, wrong = self.belief_alive, self.wrong
        for u in self.ins[node]:
            if belief_alive[u][node] == value:
                wrong[u] -= 1
                if wrong[u] == 0:
                    self.inconsistent -= 1
            else:
                wrong[u] += 1
                if wrong[u] == 1:
                    self.inconsistent += 1
        if self.config.protocol == "direct":
            subscribers = self.ins[node]
            if subscribers:
                self._count(node, len(subscribers))
                at = t + self.config.direct_latency_s
                for u in subscribers:
                    self.schedule(at, _DELIVER, u, node, value, t)

    def deliver(self, u: int, v: int, value: bool, ts: float, t: float) -> None:
        self.now = t
        self._count(u)
        if ts > self.belief_ts[u][v]:
            self.set_belief(u, v, value, ts)

    def poll_round(self, u: int, t: float, targets=None) -> None:
        """One transitive poll by ``u``; ``targets`` overrides the random pick."""
        self.now = t
        if not self.alive[u]:
            return
        out_u = self.out[u]
        d = len(out_u)
        if d == 0:
            return
        if targets is not None:
            slots = [self._index[u][v] for v in targets]
        elif self.config.poll_fanout == 1:
            slots = (int(self.poll_rng.random() * d),)
        else:
            slots = self.poll_rng.sample(range(d), min(self.config.poll_fanout, d))
        alive = self.alive
        ts_u = self.belief_ts[u]
        for i in slots:
            v = out_u[i]
            if not alive[v]:
                self._count(u)
                self.set_belief(u, v, False, t)
                continue
            self._count(u)
            self._count(v)
            self.set_belief(u, v, True, t)
            ts_v = self.belief_ts[v]
            alive_v = self.belief_alive[v]
            for w in self.shared_watch(u, i):
                tv = ts_v[w]
                if tv > ts_u[w]:
                    self.set_belief(u, w, alive_v[w], tv)

    # -- run ---------------------------------------------------------------

    def _take_probe(self, t: float) -> ProbeRecord:
        packets = self.packets
        total = sum(packets)
        rec = ProbeRecord(t, self.inconsistent, total, max(packets), total / self.n)
        self.packets = [0] * self.n
        return rec

    def run(self, script: list[tuple[float, int]] | None = None) -> RunResult:
        """Play the run to the last probe.

        ``script`` replaces the gamma change process with explicit
        ``(time, node)`` toggles.
        """
        cfg = self.config
        n = self.n
        gamma = cfg.gamma
        if script is None:
            self.schedule(sample_gamma_interval(gamma, self.change_rng), _CHANGE)
        else:
            for t, node in script:
                self.schedule(t, _CHANGE, node)
        if cfg.protocol == "transitive":
            period = cfg.poll_period_s
            for u in range(n):
                self.schedule(self.poll_rng.random() * period, _POLL, u)
        dt = cfg.probe_interval_s
        n_probes = cfg.probe_count
        probes: list[ProbeRecord] = []
        queue = self._queue
        for m in range(1, n_probes + 1):
            t_probe = m * dt
            while queue and queue[0][0] <= t_probe:
                t, _, kind, args = heapq.heappop(queue)
                if kind == _POLL:
                    u = args[0]
                    self.poll_round(u, t)
                    self.schedule(t + cfg.poll_period_s, _POLL, u)
                elif kind == _CHANGE:
                    if args:
                        self.apply_state_change(args[0], t)
                    else:
                        self.apply_state_change(self.change_rng.randrange(n), t)
                        self.schedule(t + sample_gamma_interval(gamma, self.change_rng), _CHANGE)
                else:
                    self.deliver(*args, t)
            self.now = t_probe
            probes.append(self._take_probe(t_probe))
        return RunResult(cfg, probes, self.state_changes)


def probe_inconsistencies(sim: Simulation, graph: DirectedGraph | None = None) -> int:
    """Recount nodes holding at least one wrong belief, straight from state."""
    graph = graph or sim.graph
    alive = sim.alive
    return sum(
        1
        for u, targets in enumerate(graph.out_adjacency)
        if any(sim.belief_alive[u][v] != alive[v] for v in targets)
    )


def run_simulation(config: SimConfig, graph: DirectedGraph | None = None) -> RunResult:
    """Generate the topology (unless given) and play one full run."""
    if graph is None:
        graph = generate(config.topology)
    return Simulation(graph, config).run()
