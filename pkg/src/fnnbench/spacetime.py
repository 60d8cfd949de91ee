"""Space-time audit of an experiment layout.

Event times are linear combinations of measured inputs (source and device
delays in ns, fiber lengths in m divided by the fiber light speed). Keeping
the combination explicit lets the uncertainty of a time *difference* cancel
the inputs both events share; everything else adds in quadrature.

Two events are space-like separated when ``d**2 - c**2 * dt**2 > 0``, with
``dt`` the largest time difference between their windows.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

log = logging.getLogger(__name__)

LIGHT_SPEED = 0.299792  # m/ns
FIBER_SPEED = 0.2       # m/ns


class SpacetimeConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Measured:
    value: float
    sigma: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.value) and math.isfinite(self.sigma)) or self.sigma < 0:
            raise SpacetimeConfigError(f"bad measured value {self.value} +- {self.sigma}")

    @classmethod
    def parse(cls, raw, what: str) -> "Measured":
        try:
            if isinstance(raw, (int, float)):
                value, sigma = float(raw), 0.0
            else:
                value, sigma = (float(v) for v in raw)
        except (TypeError, ValueError) as exc:
            raise SpacetimeConfigError(f"{what}: expected [value, sigma], got {raw!r}") from exc
        try:
            return cls(value, sigma)
        except SpacetimeConfigError as exc:
            raise SpacetimeConfigError(f"{what}: {exc}") from None


def _pair_key(a: str, b: str) -> frozenset:
    return frozenset((a, b))


@dataclass(frozen=True)
class GeometryTable:
    distances: Mapping[frozenset, Measured]
    fibers: Mapping[str, Measured]

    def __post_init__(self):
        for key, m in self.distances.items():
            if len(key) != 2:
                raise SpacetimeConfigError(f"distance needs two distinct nodes, got {sorted(key)}")
            if m.value <= 0:
                raise SpacetimeConfigError(f"distance {'-'.join(sorted(key))} must be > 0")
        for name, m in self.fibers.items():
            if m.value <= 0:
                raise SpacetimeConfigError(f"fiber {name} must be > 0")

    @classmethod
    def from_dict(cls, distances: Mapping[str, object], fibers: Mapping[str, object]) -> "GeometryTable":
        dist = {}
        for key, raw in distances.items():
            parts = key.split("-")
            if len(parts) != 2 or not all(parts):
                raise SpacetimeConfigError(f"distance key {key!r} must look like 'NodeA-NodeB'")
            dist[_pair_key(*parts)] = Measured.parse(raw, f"distances.{key}")
        fib = {k: Measured.parse(v, f"fibers.{k}") for k, v in fibers.items()}
        return cls(dist, fib)

    def distance(self, a: str, b: str) -> Measured:
        try:
            return self.distances[_pair_key(a, b)]
        except KeyError:
            raise SpacetimeConfigError(f"distances: no entry for {a}-{b}") from None

    def nodes(self) -> list[str]:
        return sorted({n for key in self.distances for n in key})

    def triangle_violations(self) -> list[tuple[str, str, str, float]]:
        """Triples where ``d(i,j) > d(i,k) + d(k,j)`` beyond the summed uncertainties."""
        bad = []
        nodes = self.nodes()
        for i in nodes:
            for j in nodes:
                for k in nodes:
                    if len({i, j, k}) < 3 or i > j:
                        continue
                    keys = [_pair_key(i, j), _pair_key(i, k), _pair_key(k, j)]
                    if not all(key in self.distances for key in keys):
                        continue
                    dij, dik, dkj = (self.distances[key] for key in keys)
                    excess = dij.value - dik.value - dkj.value
                    if excess > dij.sigma + dik.sigma + dkj.sigma:
                        bad.append((i, j, k, excess))
        return bad


@dataclass(frozen=True)
class DelayTable:
    delays: Mapping[str, Measured]

    def __post_init__(self):
        for name, m in self.delays.items():
            if m.value < 0:
                raise SpacetimeConfigError(f"delay {name} must be >= 0")

    @classmethod
    def from_dict(cls, raw: Mapping[str, object]) -> "DelayTable":
        return cls({k: Measured.parse(v, f"delays.{k}") for k, v in raw.items()})

    def with_delay(self, name: str, shift: float) -> "DelayTable":
        if name not in self.delays:
            raise SpacetimeConfigError(f"unknown delay {name}")
        d = dict(self.delays)
        d[name] = Measured(d[name].value + shift, d[name].sigma)
        return DelayTable(d)


@dataclass(frozen=True)
class TimeDef:
    name: str
    terms: tuple[tuple[str, float], ...] = ()


@dataclass(frozen=True)
class EventDef:
    name: str
    node: str
    start: str
    end: str


@dataclass(frozen=True)
class Layout:
    """Timing topology: named instants built from earlier instants, ``delay:X``
    and ``fiber:Y`` terms, plus events spanning two instants at a node."""

    times: tuple[TimeDef, ...]
    events: tuple[EventDef, ...]

    @classmethod
    def from_dict(cls, times: Sequence[Mapping], events: Sequence[Mapping]) -> "Layout":
        try:
            tdefs = tuple(
                TimeDef(t["name"], tuple((str(ref), float(sign)) for ref, sign in t.get("terms", [])))
                for t in times
            )
            edefs = tuple(EventDef(e["name"], e["node"], e["start"], e["end"]) for e in events)
        except (KeyError, TypeError, ValueError) as exc:
            raise SpacetimeConfigError(f"malformed timeline definition: {exc}") from exc
        return cls(tdefs, edefs)


@dataclass(frozen=True)
class LinearTime:
    """``sum(coeff[k] * input[k])`` over named inputs, in ns."""

    coeffs: Mapping[str, float]
    value: float
    inputs: Mapping[str, Measured] = field(repr=False)

    @property
    def sigma(self) -> float:
        return _sigma(self.coeffs, self.inputs)

    def minus(self, other: "LinearTime") -> "LinearTime":
        keys = set(self.coeffs) | set(other.coeffs)
        co = {k: self.coeffs.get(k, 0.0) - other.coeffs.get(k, 0.0) for k in keys}
        co = {k: v for k, v in co.items() if v != 0.0}
        return LinearTime(co, self.value - other.value, self.inputs)


def _sigma(coeffs, inputs) -> float:
    return math.sqrt(sum((c * inputs[k].sigma) ** 2 for k, c in coeffs.items()))


@dataclass(frozen=True)
class EventWindow:
    label: str
    node: str
    start: LinearTime
    end: LinearTime


def compute_event_windows(
    g: GeometryTable,
    t: DelayTable,
    v_f: float = FIBER_SPEED,
    layout: Layout | None = None,
) -> tuple[dict[str, LinearTime], dict[str, EventWindow]]:
    """Resolve every named instant and every event window of ``layout``."""
    if layout is None:
        from .config import default_layout
        layout = default_layout()
    if not v_f > 0:
        raise SpacetimeConfigError("fiber_speed must be > 0")
    inputs: dict[str, Measured] = {}
    for name, m in t.delays.items():
        inputs[f"delay:{name}"] = m
    for name, m in g.fibers.items():
        inputs[f"fiber:{name}"] = Measured(m.value / v_f, m.sigma / v_f)

    times: dict[str, LinearTime] = {}
    for td in layout.times:
        coeffs: dict[str, float] = {}
        value = 0.0
        for ref, sign in td.terms:
            if ref in times:
                base = times[ref]
                for k, c in base.coeffs.items():
                    coeffs[k] = coeffs.get(k, 0.0) + sign * c
                value += sign * base.value
            elif ref in inputs:
                coeffs[ref] = coeffs.get(ref, 0.0) + sign
                value += sign * inputs[ref].value
            else:
                raise SpacetimeConfigError(f"time {td.name}: unknown term {ref!r}")
        times[td.name] = LinearTime({k: c for k, c in coeffs.items() if c != 0.0}, value, inputs)

    windows: dict[str, EventWindow] = {}
    for ev in layout.events:
        for ref in (ev.start, ev.end):
            if ref not in times:
                raise SpacetimeConfigError(f"event {ev.name}: unknown time {ref!r}")
        w = EventWindow(ev.name, ev.node, times[ev.start], times[ev.end])
        if w.start.value > w.end.value:
            raise SpacetimeConfigError(f"event {ev.name} starts after it ends")
        if w.start.value < 0:
            log.warning("event %s starts %.2f ns before the trial origin", ev.name, -w.start.value)
        windows[ev.name] = w
    return times, windows


@dataclass(frozen=True)
class SeparationResult:
    pair: tuple[str, str]
    distance: float
    sigma_distance: float
    dt: float
    sigma_dt: float
    ds2: float
    sigma_ds2: float

    @property
    def spacelike(self) -> bool:
        return self.ds2 > 0

    def margin(self, k: float) -> float:
        return self.ds2 - k * self.sigma_ds2


def interval(d: float, dt: float, c: float = LIGHT_SPEED) -> float:
    return d * d - (c * dt) ** 2


def separation(
    pair: tuple[str, str],
    windows: Mapping[str, EventWindow],
    g: GeometryTable,
    c: float = LIGHT_SPEED,
) -> SeparationResult:
    e1, e2 = (windows[name] if name in windows else _missing(name) for name in pair)
    if e1.node == e2.node:
        dist = Measured(0.0, 0.0)
    else:
        dist = g.distance(e1.node, e2.node)
    # largest gap between the two windows, as a signed linear form
    cands = [e1.start.minus(e2.end), e1.end.minus(e2.start)]
    gap = max(cands, key=lambda f: abs(f.value))
    dt, sdt = abs(gap.value), gap.sigma
    ds2 = interval(dist.value, dt, c)
    sds2 = math.hypot(2 * dist.value * dist.sigma, 2 * c * c * dt * sdt)
    return SeparationResult(tuple(pair), dist.value, dist.sigma, dt, sdt, ds2, sds2)


def _missing(name):
    raise SpacetimeConfigError(f"unknown event {name!r}")


@dataclass(frozen=True)
class AuditReport:
    results: list[SeparationResult]
    k_sigma: float

    @property
    def verdict(self) -> bool:
        return all(r.margin(self.k_sigma) > 0 for r in self.results)


def audit_all(
    g: GeometryTable,
    t: DelayTable,
    pairs: Iterable[Sequence[str]],
    layout: Layout | None = None,
    v_f: float = FIBER_SPEED,
    c: float = LIGHT_SPEED,
    k_sigma: float = 0.0,
) -> AuditReport:
    _, windows = compute_event_windows(g, t, v_f, layout)
    results = [separation((p[0], p[1]), windows, g, c) for p in pairs]
    return AuditReport(results, k_sigma)
