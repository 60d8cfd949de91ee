import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fnnbench.config import ConfigError, default_config, load_config, loads_config, parse_config


def write(tmp_path, text, name="cfg.json"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_empty_file_gives_defaults(tmp_path):
    cfg = load_config(write(tmp_path, ""))
    s = cfg.scenario
    assert (s.v1, s.v2, s.v_h) == (0.9710, 0.9860, 0.943)
    assert s.alpha1 == s.alpha2 == pytest.approx(math.pi / 4)
    assert cfg == default_config()
    assert load_config(None) == cfg


def test_visibility_error_names_field(tmp_path):
    with pytest.raises(ConfigError, match="visibility"):
        load_config(write(tmp_path, '{"scenario": {"v1": 1.2}}'))


def test_partial_override(tmp_path):
    cfg = load_config(write(tmp_path, '{"statistics": {"total": 4700}}'))
    assert cfg.statistics.total == 4700
    assert cfg.scenario == default_config().scenario
    cfg = load_config(write(tmp_path, '{"statistics": {"total": 100}}'))
    assert cfg.statistics.total == 100 and cfg.statistics.seed == default_config().statistics.seed


def test_parse_error_has_position(tmp_path):
    with pytest.raises(ConfigError, match=r"line 2, column \d+"):
        load_config(write(tmp_path, '{\n  "scenario": {"v1": 0.9,}\n}'))


@pytest.mark.parametrize(
    "raw,msg",
    [({"bogus": {}}, "unknown configuration block"), ({"scenario": {"v3": 1}}, "unknown key"),
     ({"scenario": []}, "expected an object"), ({"optimization": {"restarts": 0}}, "optimization.restarts"),
     ({"statistics": {"total": 0}}, "statistics.total"), ({"statistics": {"total": 1.5}}, "integer"),
     ({"statistics": {"bootstrap_resamples": 50}}, "bootstrap_resamples"),
     ({"sweep": {"start": "0.5pi", "stop": "0pi"}}, "reversed"), ({"sweep": {"vary": "v1"}}, "sweep.vary"),
     ({"scenario": {"alpha1": "a lot"}}, "scenario.alpha1"), ({"scenario": {"alpha1": "0.6pi"}}, "alpha"),
     ({"scenario": {"alice_settings": [[1, 0, 0]]}}, "two Bloch"),
     ({"scenario": {"alice_settings": [[1, 0, 0], [1, 1, 0]]}}, "unit norm"),
     ({"scenario": {"v_h": "high"}}, "expected a number"), ({"scenario": {"v1": True}}, "expected a number"),
     ({"spacetime": {"fibers": {"A1": [-1, 0]}}}, "spacetime"),
     ({"spacetime": {"pairs": [["S1", "S2", "M_A"]]}}, "two event names"), ([1, 2], "root")],
)
def test_validation_errors(raw, msg):
    with pytest.raises(ConfigError, match=msg):
        parse_config(raw)


def test_angles_accept_pi_suffix():
    cfg = parse_config({"scenario": {"alpha1": "3/16pi", "alpha2": 0.5}})
    assert cfg.scenario.alpha1 == pytest.approx(3 * math.pi / 16)
    assert cfg.scenario.alpha2 == 0.5


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "nope.json")


def test_non_utf8(tmp_path):
    p = tmp_path / "bin.json"
    p.write_bytes(b"\xff\xfe{")
    with pytest.raises(ConfigError, match="UTF-8"):
        load_config(p)


def test_round_trip(tmp_path):
    cfg = parse_config({"scenario": {"alpha1": "0.1pi", "v_h": 0.5}, "statistics": {"seed": 9}})
    again = load_config(write(tmp_path, cfg.dumps()))
    assert again == cfg
    assert again.digest() == cfg.digest()
    assert again.dumps() == cfg.dumps()


@given(st.floats(0, 1), st.floats(0, math.pi / 2), st.integers(1, 10**6), st.integers(0, 2**31))
def test_round_trip_property(v, alpha, total, seed):
    cfg = parse_config({"scenario": {"v2": v, "alpha2": alpha}, "statistics": {"total": total, "seed": seed}})
    assert loads_config(cfg.dumps()) == cfg


def test_digest_tracks_changes():
    assert default_config().digest() != parse_config({"statistics": {"seed": 2}}).digest()


def test_nested_tables_replace_wholesale():
    raw = {"spacetime": {"delays": {"S1": [1.0, 0.0]}}}
    cfg = parse_config(raw)
    assert list(cfg.spacetime.delays) == ["S1"]


def test_scenario_conversion():
    s = default_config().scenario.to_scenario(alpha1=0.0)
    assert s.source1.alpha == 0.0 and s.source2.alpha == pytest.approx(math.pi / 4)
    assert s.charlie_settings[0].bloch[0] == pytest.approx(1 / math.sqrt(2))


def test_default_data_is_valid_json():
    from importlib import resources

    json.loads(resources.files("fnnbench").joinpath("data/default_config.json").read_text())
