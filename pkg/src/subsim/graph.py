"""Directed subscription graphs and the structural metrics used to validate them.

An edge ``u -> v`` means node ``u`` subscribes to (watches) node ``v``.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

# Above this size metrics default to sampled path lengths.
EXACT_PATH_LIMIT = 2000
DEFAULT_PATH_SOURCES = 400


class GraphError(ValueError):
    """Raised when an edge set violates the graph invariants."""


class DirectedGraph:
    """Immutable simple digraph on nodes ``0..n-1``.

    Both adjacency directions are stored so that "who watches v" is as cheap
    as "whom does u watch".
    """

    __slots__ = ("_n", "_out", "_in", "_m")

    def __init__(self, node_count: int, out_adjacency: Sequence[Sequence[int]]):
        if node_count < 1:
            raise GraphError(f"node_count must be >= 1, got {node_count}")
        if len(out_adjacency) != node_count:
            raise GraphError("out_adjacency must have one list per node")
        ins: list[list[int]] = [[] for _ in range(node_count)]
        outs = []
        m = 0
        for u, targets in enumerate(out_adjacency):
            targets = tuple(int(v) for v in targets)
            if len(set(targets)) != len(targets):
                raise GraphError(f"duplicate edge out of node {u}")
            for v in targets:
                if v == u:
                    raise GraphError(f"self-loop at node {u}")
                if not 0 <= v < node_count:
                    raise GraphError(f"edge {u}->{v} points outside 0..{node_count - 1}")
                ins[v].append(u)
            outs.append(targets)
            m += len(targets)
        self._n = node_count
        self._out = tuple(outs)
        self._in = tuple(tuple(x) for x in ins)
        self._m = m

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[tuple[int, int]]) -> "DirectedGraph":
        outs: list[list[int]] = [[] for _ in range(node_count)]
        for u, v in edges:
            if not 0 <= u < node_count:
                raise GraphError(f"edge {u}->{v} starts outside 0..{node_count - 1}")
            outs[u].append(v)
        return cls(node_count, outs)

    @property
    def node_count(self) -> int:
        return self._n

    @property
    def edge_count(self) -> int:
        return self._m

    @property
    def out_adjacency(self) -> tuple[tuple[int, ...], ...]:
        return self._out

    @property
    def in_adjacency(self) -> tuple[tuple[int, ...], ...]:
        return self._in

    def successors(self, u: int) -> tuple[int, ...]:
        return self._out[u]

    def predecessors(self, v: int) -> tuple[int, ...]:
        return self._in[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._out[u]

    def edges(self):
        for u, targets in enumerate(self._out):
            for v in targets:
                yield u, v

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges())

    def to_csr(self) -> sparse.csr_matrix:
        """0/1 adjacency matrix, row = subscriber."""
        indptr = np.zeros(self._n + 1, dtype=np.int64)
        np.cumsum([len(t) for t in self._out], out=indptr[1:])
        indices = np.fromiter((v for t in self._out for v in t), dtype=np.int32, count=self._m)
        data = np.ones(self._m, dtype=np.int64)
        return sparse.csr_matrix((data, indices, indptr), shape=(self._n, self._n))

    def __eq__(self, other):
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return self._n == other._n and self._out == other._out

    def __hash__(self):
        return hash((self._n, self._out))

    def __repr__(self):
        return f"DirectedGraph(n={self._n}, m={self._m})"


# -- edge-list format -------------------------------------------------------

def dumps_edgelist(g: DirectedGraph) -> str:
    lines = [f"# nodes={g.node_count}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def loads_edgelist(text: str) -> DirectedGraph:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# nodes="):
        raise GraphError("edge list must start with '# nodes=<n>'")
    try:
        n = int(lines[0][len("# nodes="):])
    except ValueError as exc:
        raise GraphError(f"bad header {lines[0]!r}") from exc
    edges = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(" ")
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: expected '<u> <v>', got {line!r}")
        edges.append((int(parts[0]), int(parts[1])))
    return DirectedGraph.from_edges(n, edges)


def write_edgelist(g: DirectedGraph, path) -> None:
    Path(path).write_text(dumps_edgelist(g))


def read_edgelist(path) -> DirectedGraph:
    return loads_edgelist(Path(path).read_text())


# -- metrics ----------------------------------------------------------------

def transitivity(g: DirectedGraph) -> float:
    """Fraction of directed two-paths i->j->k (i != k) closed by the chord i->k."""
    a = g.to_csr()
    out_deg = np.diff(a.indptr)
    in_deg = np.bincount(a.indices, minlength=g.node_count)
    reciprocal = a.multiply(a.T).sum()
    two_paths = int(np.dot(out_deg, in_deg)) - int(reciprocal)
    if two_paths == 0:
        return 0.0
    # (A @ A)[i, k] counts two-paths i->*->k; diag(A) = 0 so masking by A drops i == k.
    closed = int((a @ a).multiply(a).sum())
    return closed / two_paths


class PathLength(NamedTuple):
    avg_path_length: float
    reachable_pair_fraction: float
    exact: bool


def average_path_length(
    g: DirectedGraph,
    sources: int | None = None,
    seed: int = 0,
    block: int = 256,
) -> PathLength:
    """Mean BFS distance over reachable ordered pairs.

    ``sources=None`` runs a BFS from every node. Otherwise ``sources`` distinct
    start nodes are drawn uniformly with ``seed``. The average is NaN when no
    pair is reachable.
    """
    n = g.node_count
    if sources is None:
        starts = np.arange(n)
        exact = True
    else:
        if not 1 <= sources <= n:
            raise ValueError(f"sources must be in [1, {n}], got {sources}")
        rng = np.random.default_rng(seed)
        starts = np.sort(rng.choice(n, size=sources, replace=False))
        exact = False
    a = g.to_csr()
    total = 0
    reached = 0
    for lo in range(0, len(starts), block):
        idx = starts[lo:lo + block]
        dist = csgraph.shortest_path(a, method="D", directed=True, unweighted=True, indices=idx)
        finite = np.isfinite(dist)
        finite[np.arange(len(idx)), idx] = False
        reached += int(finite.sum())
        total += int(dist[finite].sum())
    pairs = len(starts) * (n - 1)
    avg = total / reached if reached else float("nan")
    frac = reached / pairs if pairs else 0.0
    return PathLength(avg, frac, exact)


def degree_histograms(g: DirectedGraph) -> tuple[dict[int, int], dict[int, int], dict[int, int]]:
    """(out, in, total) degree -> node-count maps."""
    out_h = Counter(len(t) for t in g.out_adjacency)
    in_h = Counter(len(s) for s in g.in_adjacency)
    tot_h = Counter(len(t) + len(s) for t, s in zip(g.out_adjacency, g.in_adjacency))
    return dict(sorted(out_h.items())), dict(sorted(in_h.items())), dict(sorted(tot_h.items()))


def total_degrees(g: DirectedGraph) -> np.ndarray:
    return np.array([len(t) + len(s) for t, s in zip(g.out_adjacency, g.in_adjacency)])


@dataclass(frozen=True)
class GraphMetrics:
    node_count: int
    edge_count: int
    avg_path_length: float
    reachable_pair_fraction: float
    transitivity: float
    exact: bool
    out_degree_histogram: dict[int, int] = field(repr=False)
    total_degree_histogram: dict[int, int] = field(repr=False)

    @property
    def max_total_degree(self) -> int:
        return max(self.total_degree_histogram)

    @property
    def min_total_degree(self) -> int:
        return min(self.total_degree_histogram)

    def row(self) -> dict:
        return {
            "nodes": self.node_count,
            "edges": self.edge_count,
            "transitivity": self.transitivity,
            "avg_path_length": self.avg_path_length,
            "reachable_fraction": self.reachable_pair_fraction,
            "exact": int(self.exact),
            "min_total_degree": self.min_total_degree,
            "max_total_degree": self.max_total_degree,
        }


def compute_metrics(g: DirectedGraph, sources: int | None = -1, seed: int = 0) -> GraphMetrics:
    """All validation metrics for ``g``.

    ``sources=-1`` picks the default: exact up to ``EXACT_PATH_LIMIT`` nodes,
    otherwise ``DEFAULT_PATH_SOURCES`` sampled BFS roots.
    """
    if sources == -1:
        sources = None if g.node_count <= EXACT_PATH_LIMIT else DEFAULT_PATH_SOURCES
    pl = average_path_length(g, sources=sources, seed=seed)
    out_h, _, tot_h = degree_histograms(g)
    return GraphMetrics(
        node_count=g.node_count,
        edge_count=g.edge_count,
        avg_path_length=pl.avg_path_length,
        reachable_pair_fraction=pl.reachable_pair_fraction,
        transitivity=transitivity(g),
        exact=pl.exact,
        out_degree_histogram=out_h,
        total_degree_histogram=tot_h,
    )
