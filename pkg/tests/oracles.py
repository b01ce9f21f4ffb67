"""Brute-force reference computations, independent of the package code paths."""
from __future__ import annotations

import math
import random
from fractions import Fraction

from scipy import integrate, optimize

INF = float("inf")


def random_digraph(n: int, p: float, rng: random.Random) -> list[tuple[int, int]]:
    return [(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < p]


def random_outdegree_digraph(n: int, d: int, rng: random.Random) -> list[tuple[int, int]]:
    edges = []
    for u in range(n):
        for v in rng.sample([x for x in range(n) if x != u], d):
            edges.append((u, v))
    return edges


def transitivity(n: int, edges) -> Fraction:
    adj = [[False] * n for _ in range(n)]
    for u, v in edges:
        adj[u][v] = True
    closed = paths = 0
    for i in range(n):
        for j in range(n):
            if not adj[i][j]:
                continue
            for k in range(n):
                if k != i and adj[j][k]:
                    paths += 1
                    if adj[i][k]:
                        closed += 1
    return Fraction(closed, paths) if paths else Fraction(0)


def floyd_warshall(n: int, edges) -> list[list[float]]:
    d = [[0 if i == j else INF for j in range(n)] for i in range(n)]
    for u, v in edges:
        d[u][v] = 1
    for m in range(n):
        dm = d[m]
        for i in range(n):
            dim = d[i][m]
            if dim == INF:
                continue
            di = d[i]
            for j in range(n):
                if dim + dm[j] < di[j]:
                    di[j] = dim + dm[j]
    return d


def path_length(n: int, edges) -> tuple[float, float]:
    d = floyd_warshall(n, edges)
    total = count = 0
    for i in range(n):
        for j in range(n):
            if i != j and d[i][j] < INF:
                total += d[i][j]
                count += 1
    avg = total / count if count else float("nan")
    return avg, count / (n * (n - 1))


def inconsistent_nodes(out_adjacency, beliefs, alive) -> int:
    count = 0
    for u, targets in enumerate(out_adjacency):
        for v in targets:
            if beliefs[u][v] != alive[v]:
                count += 1
                break
    return count


def t_pdf(x: float, df: int) -> float:
    c = math.exp(math.lgamma((df + 1) / 2) - math.lgamma(df / 2)) / math.sqrt(df * math.pi)
    return c * (1 + x * x / df) ** (-(df + 1) / 2)


def t_cdf(x: float, df: int) -> float:
    """CDF by quadrature of the density (symmetric, so integrate from 0)."""
    half, _ = integrate.quad(t_pdf, 0, abs(x), args=(df,), epsabs=1e-13, epsrel=1e-13, limit=200)
    return 0.5 + half if x >= 0 else 0.5 - half


def t_quantile(df: int, p: float = 0.975) -> float:
    return optimize.brentq(lambda x: t_cdf(x, df) - p, 0.0, 1000.0, xtol=1e-12)
