"""Flat ``key = value`` configuration files for simulation runs.

Recognised keys (anything else is rejected)::

    kind             sw | sf | ke | random          (default ke)
    n                node count                      (required)
    k                subscriptions per node          (default round(sqrt(n)))
    mu               KE long-range probability       (default 0.0)
    p_rewire         SW rewiring probability         (default 0.1)
    p_invert         SF/KE inversion probability     (default 0.15)
    ke_offset        KE deactivation offset          (default k)
    topology_seed    generator seed                  (default 0)
    protocol         direct | transitive             (default transitive)
    rate_pct         % of nodes changing per minute  (default 1.0)
    mean_interval_s  overrides rate_pct when given
    gamma_shape      gamma shape                     (default 2.0)
    duration_s       run length in seconds           (default 3600)
    probe_interval_s probe spacing in seconds        (default 1.0)
    direct_latency_s direct notification latency     (default 0.1)
    poll_period_s    transitive poll period          (default 1.0)
    poll_fanout      targets per poll                (default 1)
    sim_seed         simulation seed                 (default 0)

Blank lines and lines starting with ``#`` are ignored.
"""
from __future__ import annotations

from pathlib import Path

from subsim.simengine import GammaParams, SimConfig
from subsim.topology import TopologyParams, default_subscriptions


class ConfigError(ValueError):
    pass


_INT = {"n", "k", "topology_seed", "poll_fanout", "sim_seed"}
_FLOAT = {
    "mu", "p_rewire", "p_invert", "ke_offset", "rate_pct", "mean_interval_s", "gamma_shape",
    "duration_s", "probe_interval_s", "direct_latency_s", "poll_period_s",
}
_STR = {"kind", "protocol"}
KEYS = _INT | _FLOAT | _STR


def parse_config(text: str) -> SimConfig:
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, val = (part.strip() for part in line.partition("="))
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if key not in KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = int(val) if key in _INT else float(val) if key in _FLOAT else val
        except ValueError:
            raise ConfigError(f"line {lineno}: bad value for {key}: {val!r}") from None
    return config_from_mapping(values)


def config_from_mapping(values: dict) -> SimConfig:
    if "n" not in values:
        raise ConfigError("missing required key 'n'")
    n = values["n"]
    try:
        topo = TopologyParams(
            kind=values.get("kind", "ke"),
            n=n,
            k=values.get("k", default_subscriptions(n)),
            mu=values.get("mu", 0.0),
            p_rewire=values.get("p_rewire", 0.1),
            p_invert=values.get("p_invert", 0.15),
            seed=values.get("topology_seed", 0),
            ke_offset=values.get("ke_offset"),
        )
        shape = values.get("gamma_shape", 2.0)
        if "mean_interval_s" in values:
            gamma = GammaParams(values["mean_interval_s"], shape)
        else:
            gamma = GammaParams.from_rate(values.get("rate_pct", 1.0), n, shape)
        return SimConfig(
            topology=topo,
            gamma=gamma,
            protocol=values.get("protocol", "transitive"),
            duration_s=values.get("duration_s", 3600.0),
            probe_interval_s=values.get("probe_interval_s", 1.0),
            direct_latency_s=values.get("direct_latency_s", 0.1),
            poll_period_s=values.get("poll_period_s", 1.0),
            poll_fanout=values.get("poll_fanout", 1),
            sim_seed=values.get("sim_seed", 0),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def format_config(cfg: SimConfig) -> str:
    t = cfg.topology
    lines = [
        f"kind = {t.kind}",
        f"n = {t.n}",
        f"k = {t.k}",
        f"mu = {t.mu!r}",
        f"p_rewire = {t.p_rewire!r}",
        f"p_invert = {t.p_invert!r}",
    ]
    if t.ke_offset is not None:
        lines.append(f"ke_offset = {float(t.ke_offset)!r}")
    lines += [
        f"topology_seed = {t.seed}",
        f"protocol = {cfg.protocol}",
        f"mean_interval_s = {cfg.gamma.mean_interval_s!r}",
        f"gamma_shape = {cfg.gamma.shape!r}",
        f"duration_s = {cfg.duration_s!r}",
        f"probe_interval_s = {cfg.probe_interval_s!r}",
        f"direct_latency_s = {cfg.direct_latency_s!r}",
        f"poll_period_s = {cfg.poll_period_s!r}",
        f"poll_fanout = {cfg.poll_fanout}",
        f"sim_seed = {cfg.sim_seed}",
    ]
    return "\n".join(lines) + "\n"


def load_config(path) -> SimConfig:
    return parse_config(Path(path).read_text())
