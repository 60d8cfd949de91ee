import logging

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import SEPARATIONS, TIMELINE
from fnnbench.config import default_config
from fnnbench.spacetime import (
    LIGHT_SPEED,
    DelayTable,
    EventWindow,
    GeometryTable,
    Layout,
    LinearTime,
    Measured,
    SpacetimeConfigError,
    audit_all,
    compute_event_windows,
    interval,
    separation,
)


@pytest.fixture
def cfg():
    return default_config().spacetime


def run(cfg, delays=None, k=0.0, geometry=None):
    return audit_all(geometry or cfg.geometry(), delays or cfg.delay_table(), cfg.pairs, cfg.layout(),
                     cfg.fiber_speed, cfg.light_speed, k)


def test_timeline_values(cfg):
    times, windows = compute_event_windows(cfg.geometry(), cfg.delay_table(), cfg.fiber_speed, cfg.layout())
    for name, (value, sigma) in TIMELINE.items():
        assert round(times[name].value, 2) == value
        assert round(times[name].sigma, 1) == sigma
    assert all(w.start.value <= w.end.value for w in windows.values())


def test_default_layout_used(cfg):
    times, _ = compute_event_windows(cfg.geometry(), cfg.delay_table())
    assert round(times["T_M_A"].value, 2) == 862.95


def test_table_rows(cfg):
    rep = run(cfg)
    assert len(rep.results) == 12
    for r in rep.results:
        d, dt, sdt, ds2, sds2 = SEPARATIONS[r.pair]
        assert r.distance == d
        assert r.dt == pytest.approx(dt, abs=0.01)
        assert r.sigma_dt == pytest.approx(sdt, abs=0.006)
        assert abs(r.ds2 - ds2) <= 2
        assert r.sigma_ds2 == pytest.approx(sds2, rel=0.05)
        assert r.spacelike
    assert rep.verdict


def test_delay_perturbation_breaks_verdict(cfg, caplog):
    with caplog.at_level(logging.WARNING):
        rep = run(cfg, cfg.delay_table().with_delay("QRNG_A", 400.0))
    assert not rep.verdict
    bad = [r.pair for r in rep.results if not r.spacelike]
    assert bad == [("QRNG_A", "M_B")]
    assert "before the trial origin" in caplog.text


def test_k_sigma_verdict(cfg):
    assert run(cfg, k=1.0).verdict
    # the tightest row is QRNG_C-S2 with 1924 +- 214, i.e. about 9 sigma
    assert not run(cfg, k=10.0).verdict


def test_colocated_events():
    g = GeometryTable({}, {})
    w = lambda t0, t1: EventWindow("e", "X", LinearTime({}, t0, {}), LinearTime({}, t1, {}))
    r = separation(("a", "b"), {"a": w(0, 0), "b": w(1, 1)}, g)
    assert r.ds2 == pytest.approx(-LIGHT_SPEED**2, abs=1e-12)
    assert round(r.ds2, 4) == -0.0899 and not r.spacelike


def test_pair_order_symmetry(cfg):
    _, windows = compute_event_windows(cfg.geometry(), cfg.delay_table(), cfg.fiber_speed, cfg.layout())
    for a, b in cfg.pairs:
        r1 = separation((a, b), windows, cfg.geometry())
        r2 = separation((b, a), windows, cfg.geometry())
        assert r1.ds2 == pytest.approx(r2.ds2, abs=1e-9)
        assert r1.sigma_ds2 == pytest.approx(r2.sigma_ds2, abs=1e-9)


@given(st.floats(0.1, 10))
def test_distance_scaling(k):
    cfg = default_config().spacetime
    g = cfg.geometry()
    scaled = GeometryTable({key: Measured(m.value * k, m.sigma) for key, m in g.distances.items()}, g.fibers)
    base, big = run(cfg), run(cfg, geometry=scaled)
    for r0, r1 in zip(base.results, big.results):
        assert r1.dt == r0.dt
        assert r1.ds2 + (LIGHT_SPEED * r1.dt) ** 2 == pytest.approx(k**2 * r0.distance**2, rel=1e-12)


def test_shared_inputs_cancel():
    inputs = {"x": Measured(10, 3), "y": Measured(5, 4)}
    t1 = LinearTime({"x": 1, "y": 1}, 15, inputs)
    t2 = LinearTime({"x": 1}, 10, inputs)
    assert t1.sigma == pytest.approx(5.0)
    assert t1.minus(t2).sigma == pytest.approx(4.0)


def test_interval():
    assert interval(3.0, 0.0) == 9.0
    assert interval(0.0, 1.0, c=1.0) == -1.0


def test_missing_distance(cfg):
    d = dict(cfg.distances)
    del d["Alice-S2"]
    g = GeometryTable.from_dict(d, cfg.fibers)
    with pytest.raises(SpacetimeConfigError, match="Alice-S2"):
        run(cfg, geometry=g)


def test_unknown_event(cfg):
    with pytest.raises(SpacetimeConfigError, match="unknown event"):
        audit_all(cfg.geometry(), cfg.delay_table(), [("S1", "nowhere")], cfg.layout())


@pytest.mark.parametrize(
    "distances,msg",
    [({"A-B": [-1, 1]}, "> 0"), ({"AB": [1, 1]}, "NodeA-NodeB"), ({"A-B": "far"}, "value, sigma"),
     ({"A-B": [1, -1]}, "bad measured")],
)
def test_geometry_validation(distances, msg):
    with pytest.raises(SpacetimeConfigError, match=msg):
        GeometryTable.from_dict(distances, {})


def test_triangle_inequality(cfg):
    assert cfg.geometry().triangle_violations() == []
    g = GeometryTable.from_dict({"A-B": [10, 0.1], "B-C": [1, 0.1], "A-C": [1, 0.1]}, {})
    assert g.triangle_violations()


def test_delay_validation():
    with pytest.raises(SpacetimeConfigError):
        DelayTable.from_dict({"S1": [-1, 0]})
    with pytest.raises(SpacetimeConfigError, match="unknown delay"):
        DelayTable.from_dict({"S1": [1, 0]}).with_delay("S9", 1.0)


def test_layout_errors(cfg):
    g, t = cfg.geometry(), cfg.delay_table()
    bad_term = Layout.from_dict([{"name": "T0", "terms": [["delay:nope", 1]]}], [])
    with pytest.raises(SpacetimeConfigError, match="unknown term"):
        compute_event_windows(g, t, 0.2, bad_term)
    backwards = Layout.from_dict(
        [{"name": "T0", "terms": []}, {"name": "T1", "terms": [["delay:S1", -1]]}],
        [{"name": "E", "node": "Alice", "start": "T0", "end": "T1"}],
    )
    with pytest.raises(SpacetimeConfigError, match="starts after it ends"):
        compute_event_windows(g, t, 0.2, backwards)
    with pytest.raises(SpacetimeConfigError, match="malformed"):
        Layout.from_dict([{"terms": []}], [])
    with pytest.raises(SpacetimeConfigError, match="fiber_speed"):
        compute_event_windows(g, t, 0.0, cfg.layout())
