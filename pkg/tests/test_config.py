import pytest

from subsim.config import ConfigError, format_config, load_config, parse_config

EXAMPLE = """\
# a KE run at desk scale
kind = ke
n = 100
mu = 0.2
protocol = direct
rate_pct = 10
duration_s = 120
sim_seed = 5
"""


def test_parse_defaults_and_values():
    cfg = parse_config(EXAMPLE)
    assert cfg.topology.kind == "ke"
    assert cfg.topology.n == 100 and cfg.topology.k == 10
    assert cfg.topology.mu == 0.2
    assert cfg.protocol == "direct"
    # 10% of 100 nodes per minute: one change every 6 s on average.
    assert cfg.gamma.mean_interval_s == pytest.approx(6.0)
    assert cfg.gamma.shape == 2.0
    assert cfg.duration_s == 120.0
    assert cfg.sim_seed == 5
    assert cfg.poll_period_s == 1.0 and cfg.poll_fanout == 1


def test_mean_interval_overrides_rate():
    cfg = parse_config("n = 50\nrate_pct = 10\nmean_interval_s = 2.5\n")
    assert cfg.gamma.mean_interval_s == 2.5


def test_roundtrip():
    cfg = parse_config(EXAMPLE + "ke_offset = 3\ngamma_shape = 1.5\npoll_fanout = 2\n")
    assert parse_config(format_config(cfg)) == cfg


def test_load_config(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(EXAMPLE)
    assert load_config(path) == parse_config(EXAMPLE)


@pytest.mark.parametrize("text, match", [
    ("n = 10\ncolour = red\n", "unknown key"),
    ("kind = sw\n", "missing required key"),
    ("n = 10\nn = 12\n", "duplicate"),
    ("n = ten\n", "bad value"),
    ("n = 10\nmu\n", "expected"),
    ("n = 10\nmu = 1.5\n", "mu"),
    ("n = 10\nprotocol = gossip\n", "protocol"),
    ("n = 10\nkind = sw\nk = 3\n", "even"),
])
def test_rejects(text, match):
    with pytest.raises(ConfigError, match=match):
        parse_config(text)
