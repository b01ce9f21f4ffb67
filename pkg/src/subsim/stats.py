"""Cross-run summaries with Student-t confidence intervals."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

from scipy import special

SUMMARY_HEADER = ("label", "count", "mean", "std", "min", "max", "ci95")


def t_quantile(df: int, p: float = 0.975) -> float:
    """p-quantile of Student's t with ``df`` degrees of freedom.

    Inverts the regularized incomplete beta form of the t CDF,
    ``F(t) = 1 - I_x(df/2, 1/2) / 2`` with ``x = df / (df + t^2)`` for t > 0.
    """
    if df < 1:
        raise ValueError(f"df must be >= 1, got {df}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if p == 0.5:
        return 0.0
    tail = 2.0 * min(p, 1.0 - p)
    x = special.betaincinv(df / 2.0, 0.5, tail)
    t = math.sqrt(df * (1.0 - x) / x)
    return t if p > 0.5 else -t


@dataclass(frozen=True)
class Summary:
    count: int
    mean: float
    std: float
    min: float
    max: float
    ci95: float
    label: str = ""

    def row(self) -> tuple:
        return (self.label, self.count, self.mean, self.std, self.min, self.max, self.ci95)


def summarize_runs(values: Sequence[float], label: str = "") -> Summary:
    """Mean, sample std (r-1 divisor), extremes and 95% CI half-width."""
    xs = sorted(float(v) for v in values)
    r = len(xs)
    if r < 2:
        raise ValueError(f"need at least 2 runs for a confidence interval, got {r}")
    mean = math.fsum(xs) / r
    # Clamp so rounding cannot push a constant sample's mean outside [min, max].
    mean = min(max(mean, xs[0]), xs[-1])
    var = math.fsum((x - mean) ** 2 for x in xs) / (r - 1)
    std = math.sqrt(var)
    ci = t_quantile(r - 1) * std / math.sqrt(r)
    return Summary(r, mean, std, xs[0], xs[-1], ci, label)


def summaries_to_csv(summaries: Sequence[Summary]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_HEADER)
    for s in summaries:
        w.writerow((s.label, s.count, *(f"{v:.6g}" for v in (s.mean, s.std, s.min, s.max, s.ci95))))
    return buf.getvalue()


def read_summary_csv(text: str) -> list[Summary]:
    rows = list(csv.reader(io.StringIO(text)))
    if tuple(rows[0]) != SUMMARY_HEADER:
        raise ValueError(f"unexpected summary header {rows[0]}")
    return [
        Summary(int(c), float(m), float(s), float(lo), float(hi), float(ci), label)
        for label, c, m, s, lo, hi, ci in rows[1:]
    ]
