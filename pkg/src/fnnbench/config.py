"""JSON configuration for the command-line workflows.

Every block is optional; missing keys fall back to the measured parameters
shipped in ``data/default_config.json``. Unknown keys are rejected. Angles
may be raw radians or strings such as ``"0.25pi"`` or ``"3/16pi"``.
"""
from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import asdict, dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .scenario import ObservableSpec, Scenario, SourceSpec, BsmSpec, parse_angle
from .spacetime import DelayTable, GeometryTable, Layout, SpacetimeConfigError


class ConfigError(ValueError):
    pass


@lru_cache(maxsize=1)
def _default_text() -> str:
    return resources.files("fnnbench").joinpath("data/default_config.json").read_text("utf-8")


def default_raw() -> dict:
    return json.loads(_default_text())


@dataclass(frozen=True)
class ScenarioConfig:
    v1: float
    v2: float
    v_h: float
    alpha1: float
    alpha2: float
    alice_settings: tuple
    charlie_settings: tuple

    def to_scenario(self, **override) -> Scenario:
        vals = {**asdict(self), **override}
        return Scenario(
            SourceSpec(vals["alpha1"], vals["v1"]),
            SourceSpec(vals["alpha2"], vals["v2"]),
            BsmSpec(vals["v_h"]),
            tuple(ObservableSpec(tuple(b)) for b in vals["alice_settings"]),
            tuple(ObservableSpec(tuple(b)) for b in vals["charlie_settings"]),
        )


@dataclass(frozen=True)
class SweepConfig:
    vary: str
    start: float
    stop: float
    steps: int


@dataclass(frozen=True)
class StatisticsConfig:
    total: int
    seed: int
    bootstrap_resamples: int


@dataclass(frozen=True)
class OptimizationConfig:
    n_lambda: int
    restarts: int
    iters: int
    seed: int
    random_models: int


@dataclass(frozen=True)
class SpacetimeConfig:
    fiber_speed: float
    light_speed: float
    k_sigma: float
    distances: dict
    fibers: dict
    delays: dict
    times: list
    events: list
    pairs: list

    def geometry(self) -> GeometryTable:
        return GeometryTable.from_dict(self.distances, self.fibers)

    def delay_table(self) -> DelayTable:
        return DelayTable.from_dict(self.delays)

    def layout(self) -> Layout:
        return Layout.from_dict(self.times, self.events)

    def __hash__(self):
        return hash(json.dumps(asdict(self), sort_keys=True))


@dataclass(frozen=True)
class WorkbenchConfig:
    scenario: ScenarioConfig
    sweep: SweepConfig
    statistics: StatisticsConfig
    optimization: OptimizationConfig
    spacetime: SpacetimeConfig

    def to_dict(self) -> dict:
        return json.loads(json.dumps(asdict(self)))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def digest(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()


BLOCKS = ("scenario", "sweep", "statistics", "optimization", "spacetime")


def _merge(raw: dict, defaults: dict) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError("configuration root must be a JSON object")
    unknown = set(raw) - set(BLOCKS)
    if unknown:
        raise ConfigError(f"unknown configuration block(s): {sorted(unknown)}")
    merged = copy.deepcopy(defaults)
    for block, values in raw.items():
        if not isinstance(values, dict):
            raise ConfigError(f"{block}: expected an object")
        bad = set(values) - set(defaults[block])
        if bad:
            raise ConfigError(f"{block}: unknown key(s) {sorted(bad)}")
        # nested tables are replaced as a whole, never merged entry by entry
        merged[block].update(copy.deepcopy(values))
    return merged


def _num(block, key, value, kind=float, lo=None, hi=None, what=None):
    field = f"{block}.{key}"
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{field}: expected a number, got {value!r}")
    if kind is int:
        if float(value) != int(value):
            raise ConfigError(f"{field}: expected an integer, got {value!r}")
        value = int(value)
    else:
        value = float(value)
    label = what or key
    if lo is not None and value < lo:
        raise ConfigError(f"{field}: {label} must be >= {lo}, got {value}")
    if hi is not None and value > hi:
        raise ConfigError(f"{field}: {label} must be <= {hi}, got {value}")
    return value


def _angle(block, key, value) -> float:
    try:
        return parse_angle(value)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{block}.{key}: cannot parse angle {value!r}") from exc


def _build(m: dict) -> WorkbenchConfig:
    s = m["scenario"]
    sc = ScenarioConfig(
        v1=_num("scenario", "v1", s["v1"], lo=0, hi=1, what="visibility"),
        v2=_num("scenario", "v2", s["v2"], lo=0, hi=1, what="visibility"),
        v_h=_num("scenario", "v_h", s["v_h"], lo=0, hi=1, what="HOM visibility"),
        alpha1=_angle("scenario", "alpha1", s["alpha1"]),
        alpha2=_angle("scenario", "alpha2", s["alpha2"]),
        alice_settings=_settings("alice_settings", s["alice_settings"]),
        charlie_settings=_settings("charlie_settings", s["charlie_settings"]),
    )
    try:
        sc.to_scenario()
    except ValueError as exc:
        raise ConfigError(f"scenario: {exc}") from exc

    w = m["sweep"]
    if w["vary"] not in ("alpha1", "alpha2"):
        raise ConfigError(f"sweep.vary: must be 'alpha1' or 'alpha2', got {w['vary']!r}")
    sw = SweepConfig(
        vary=w["vary"],
        start=_angle("sweep", "start", w["start"]),
        stop=_angle("sweep", "stop", w["stop"]),
        steps=_num("sweep", "steps", w["steps"], int, lo=1),
    )
    if sw.stop < sw.start:
        raise ConfigError(f"sweep: grid bounds reversed (start {sw.start} > stop {sw.stop})")

    t = m["statistics"]
    st = StatisticsConfig(
        total=_num("statistics", "total", t["total"], int, lo=1),
        seed=_num("statistics", "seed", t["seed"], int, lo=0),
        bootstrap_resamples=_num("statistics", "bootstrap_resamples", t["bootstrap_resamples"], int, lo=100),
    )

    o = m["optimization"]
    op = OptimizationConfig(
        n_lambda=_num("optimization", "n_lambda", o["n_lambda"], int, lo=1),
        restarts=_num("optimization", "restarts", o["restarts"], int, lo=1),
        iters=_num("optimization", "iters", o["iters"], int, lo=1),
        seed=_num("optimization", "seed", o["seed"], int, lo=0),
        random_models=_num("optimization", "random_models", o["random_models"], int, lo=0),
    )

    p = m["spacetime"]
    sp = SpacetimeConfig(
        fiber_speed=_num("spacetime", "fiber_speed", p["fiber_speed"], lo=1e-9),
        light_speed=_num("spacetime", "light_speed", p["light_speed"], lo=1e-9),
        k_sigma=_num("spacetime", "k_sigma", p["k_sigma"], lo=0),
        distances=p["distances"],
        fibers=p["fibers"],
        delays=p["delays"],
        times=p["times"],
        events=p["events"],
        pairs=[list(pair) for pair in p["pairs"]],
    )
    try:
        sp.geometry()
        sp.delay_table()
        sp.layout()
    except SpacetimeConfigError as exc:
        raise ConfigError(f"spacetime: {exc}") from exc
    for pair in sp.pairs:
        if len(pair) != 2:
            raise ConfigError(f"spacetime.pairs: each pair needs two event names, got {pair}")
    return WorkbenchConfig(sc, sw, st, op, sp)


def _settings(key, raw) -> tuple:
    try:
        vecs = tuple(tuple(float(v) for v in b) for b in raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"scenario.{key}: expected two Bloch vectors") from exc
    if len(vecs) != 2:
        raise ConfigError(f"scenario.{key}: expected two Bloch vectors, got {len(vecs)}")
    for v in vecs:
        try:
            ObservableSpec(v)
        except ValueError as exc:
            raise ConfigError(f"scenario.{key}: {exc}") from exc
    return vecs


def parse_config(raw: dict) -> WorkbenchConfig:
    return _build(_merge(raw, default_raw()))


def loads_config(text: str) -> WorkbenchConfig:
    if not text.strip():
        return parse_config({})
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_config(raw)


def load_config(path=None) -> WorkbenchConfig:
    """Load and validate a configuration file; ``None`` gives the defaults."""
    if path is None:
        return parse_config({})
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except UnicodeDecodeError as exc:
        raise ConfigError(f"config file is not UTF-8: {path}") from exc
    return loads_config(text)


def default_config() -> WorkbenchConfig:
    return parse_config({})


def default_layout() -> Layout:
    return default_config().spacetime.layout()
