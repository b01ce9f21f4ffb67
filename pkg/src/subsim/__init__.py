"""Subscription-network aliveness simulation over directed complex networks."""

from subsim.graph import DirectedGraph, GraphMetrics, compute_metrics
from subsim.topology import TopologyParams, generate
from subsim.simengine import GammaParams, SimConfig, RunResult, run_simulation
from subsim.stats import Summary, summarize_runs, t_quantile

__all__ = [
    "DirectedGraph",
    "GraphMetrics",
    "compute_metrics",
    "TopologyParams",
    "generate",
    "GammaParams",
    "SimConfig",
    "RunResult",
    "run_simulation",
    "Summary",
    "summarize_runs",
    "t_quantile",
]

__version__ = "0.1.0"
