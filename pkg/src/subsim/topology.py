"""Seeded generators for directed subscription topologies.

Four families: a rewired ring (small world), preferential-attachment growth
with edge inversion (scale free), Klemm-Eguiluz growth with long-range
mixing, and uniform random subscriptions.
"""
from __future__ import annotations

import random
from dataclasses import asdict, dataclass

from subsim.graph import DirectedGraph

KINDS = ("sw", "sf", "ke", "random")
_KIND_ALIASES = {
    "smallworld": "sw",
    "small_world": "sw",
    "scalefree": "sf",
    "scale_free": "sf",
    "klemmeguiluz": "ke",
    "klemm_eguiluz": "ke",
    "rand": "random",
}


def _check_prob(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class TopologyParams:
    kind: str
    n: int
    k: int
    mu: float = 0.0
    p_rewire: float = 0.1
    p_invert: float = 0.15
    seed: int = 0
    ke_offset: float | None = None

    def __post_init__(self):
        kind = _KIND_ALIASES.get(self.kind.lower(), self.kind.lower())
        if kind not in KINDS:
            raise ValueError(f"unknown topology kind {self.kind!r}; expected one of {KINDS}")
        object.__setattr__(self, "kind", kind)
        for name in ("mu", "p_rewire", "p_invert"):
            _check_prob(name, getattr(self, name))
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        # Growth models accept n == k (seed network only).
        if kind in ("sf", "ke"):
            if self.k < 2 or self.n < self.k:
                raise ValueError(f"{kind} needs k >= 2 and n >= k, got n={self.n}, k={self.k}")
        elif self.k >= self.n:
            raise ValueError(f"{kind} needs k < n, got n={self.n}, k={self.k}")
        if self.ke_offset is not None and self.ke_offset < 0:
            raise ValueError(f"ke_offset must be >= 0, got {self.ke_offset}")
        if kind == "sw" and self.k % 2:
            raise ValueError(f"small-world k must be even, got {self.k}")

    def to_dict(self) -> dict:
        return asdict(self)


def generate(params: TopologyParams) -> DirectedGraph:
    if params.kind == "sw":
        return gen_small_world(params.n, params.k, params.p_rewire, params.seed)
    if params.kind == "sf":
        return gen_scale_free(params.n, params.k, params.p_invert, params.seed)
    if params.kind == "ke":
        return gen_ke(params.n, params.k, params.mu, params.p_invert, params.seed, params.ke_offset)
    return gen_random(params.n, params.k, params.seed)


def ring_lattice(n: int, k: int) -> list[list[int]]:
    half = k // 2
    return [
        [(i + s) % n for d in range(1, half + 1) for s in (d, -d)]
        for i in range(n)
    ]


def gen_small_world(n: int, k: int, p_rewire: float = 0.1, seed: int = 0) -> DirectedGraph:
    """Directed ring lattice (each node watches its k nearest neighbours) with
    every edge's head independently rewired with probability ``p_rewire``."""
    if k % 2 or k < 2:
        raise ValueError(f"k must be even and >= 2, got {k}")
    if k >= n:
        raise ValueError(f"k must be < n, got n={n}, k={k}")
    _check_prob("p_rewire", p_rewire)
    rng = random.Random(seed)
    outs = ring_lattice(n, k)
    for u in range(n):
        targets = outs[u]
        present = set(targets)
        for i in range(k):
            if rng.random() >= p_rewire:
                continue
            while True:
                v = rng.randrange(n)
                if v != u and v not in present:
                    break
            present.discard(targets[i])
            present.add(v)
            targets[i] = v
    return DirectedGraph(n, outs)


class _Attachment:
    """Degree-proportional sampler: each node appears once per edge endpoint."""

    def __init__(self, rng: random.Random):
        self.rng = rng
        self.pool: list[int] = []

    def add_edge(self, u: int, v: int) -> None:
        self.pool.append(u)
        self.pool.append(v)

    def pick(self, exclude) -> int:
        pool, rng = self.pool, self.rng
        while True:
            v = pool[int(rng.random() * len(pool))]
            if v not in exclude:
                return v


def _grow_edges(j: int, targets: list[int], p_invert: float, rng: random.Random, outs, pa: _Attachment):
    for t in targets:
        if rng.random() < p_invert:
            outs[t].append(j)
        else:
            outs[j].append(t)
    for t in targets:
        pa.add_edge(j, t)


def gen_scale_free(n: int, k: int, p_invert: float = 0.15, seed: int = 0) -> DirectedGraph:
    """Directed preferential-attachment growth with edge inversion.

    Seed network: nodes ``0..k-2`` each linked to and from node ``k-1``. Each
    later node attaches ``k`` edges to distinct existing nodes chosen with
    probability proportional to total degree; each edge then points back at
    the newcomer with probability ``p_invert``.
    """
    if k < 2 or n < k:
        raise ValueError(f"need k >= 2 and n >= k, got n={n}, k={k}")
    _check_prob("p_invert", p_invert)
    rng = random.Random(seed)
    outs: list[list[int]] = [[] for _ in range(n)]
    pa = _Attachment(rng)
    hub = k - 1
    for i in range(hub):
        outs[i].append(hub)
        outs[hub].append(i)
        pa.add_edge(i, hub)
        pa.add_edge(hub, i)
    for j in range(k, n):
        chosen: list[int] = []
        seen: set[int] = set()
        for _ in range(k):
            t = pa.pick(seen)
            seen.add(t)
            chosen.append(t)
        _grow_edges(j, chosen, p_invert, rng, outs, pa)
    return DirectedGraph(n, outs)


def gen_ke(
    n: int,
    k: int,
    mu: float,
    p_invert: float = 0.15,
    seed: int = 0,
    offset: float | None = None,
) -> DirectedGraph:
    """Directed Klemm-Eguiluz growth.

    Starts from a complete digraph on ``k`` active nodes. Each newcomer gets
    one edge per active node; with probability ``mu`` that slot is redirected
    to a preferential-attachment target. Edges are inverted with probability
    ``p_invert``. The newcomer then joins the active set and one previously
    active node is dropped with probability proportional to
    ``1 / (offset + degree)``.

    ``offset`` defaults to ``k``, which gives the degree exponent 3 of the
    undirected model; ``offset=0`` weights by bare inverse degree, whose
    long-lived actives act as hubs and shorten paths at small ``mu``.
    """
    if k < 2 or n < k:
        raise ValueError(f"need k >= 2 and n >= k, got n={n}, k={k}")
    if offset is None:
        offset = k
    if offset < 0:
        raise ValueError(f"offset must be >= 0, got {offset}")
    _check_prob("mu", mu)
    _check_prob("p_invert", p_invert)
    rng = random.Random(seed)
    outs: list[list[int]] = [[] for _ in range(n)]
    degree = [0] * n
    pa = _Attachment(rng)
    for u in range(k):
        for v in range(k):
            if u != v:
                outs[u].append(v)
    for u in range(k):
        for v in range(u + 1, k):
            pa.add_edge(u, v)
            pa.add_edge(v, u)
        degree[u] = 2 * (k - 1)
    active = list(range(k))
    for j in range(k, n):
        long_range = [rng.random() < mu for _ in active]
        chosen = [a for a, lr in zip(active, long_range) if not lr]
        taken = set(chosen)
        for _ in range(long_range.count(True)):
            t = pa.pick(taken)
            taken.add(t)
            chosen.append(t)
        _grow_edges(j, chosen, p_invert, rng, outs, pa)
        degree[j] = k
        for t in chosen:
            degree[t] += 1
        inv = [1.0 / (offset + degree[a]) for a in active]
        r = rng.random() * sum(inv)
        drop = len(active) - 1
        acc = 0.0
        for i, w in enumerate(inv):
            acc += w
            if r < acc:
                drop = i
                break
        active[drop] = j
    return DirectedGraph(n, outs)


def gen_random(n: int, k: int, seed: int = 0) -> DirectedGraph:
    """Every node watches ``k`` distinct uniformly random other nodes."""
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got n={n}, k={k}")
    rng = random.Random(seed)
    outs = []
    for u in range(n):
        picks = rng.sample(range(n - 1), k)
        outs.append([v + 1 if v >= u else v for v in picks])
    return DirectedGraph(n, outs)


def default_subscriptions(n: int) -> int:
    """Subscriptions per node when sized from the data-centre size: round(sqrt n)."""
    return max(1, round(n ** 0.5))
