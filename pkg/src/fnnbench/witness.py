"""Full-network-nonlocality witnesses and their theory curves.

Both witnesses are bounded by 3 whenever one of the two sources is classical
and the other is an arbitrary no-signaling resource; exceeding 3 for both at
once certifies that neither source is classical.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .born import RANGE_TOL, CorrelatorSet, compute_distribution, correlators
from .scenario import default_paper_scenario

BOUND = 3.0
SQRT2 = math.sqrt(2.0)


def _check_range(c: CorrelatorSet) -> None:
    if not c.max_abs() <= 1 + RANGE_TOL:
        raise ValueError(f"correlator outside [-1, 1]: max |value| = {c.max_abs():.6g}")


def eval_r_cns(c: CorrelatorSet, check: bool = True):
    """Witness against a classical Alice-Bob source.

    2<A0 B1 (C0 - C1)> + <A1 B0 (2 C0 + C1)> - <B0>
        + (<A1 B0> + <B0 C0> - <C0>) <C1>
    """
    if check:
        _check_range(c)
    abc = c.abc
    return (
        2 * (abc[..., 0, 1, 0] - abc[..., 0, 1, 1])
        + 2 * abc[..., 1, 0, 0] + abc[..., 1, 0, 1]
        - c.b0
        + (c.ab[..., 1, 0] + c.bc[..., 0, 0] - c.c[..., 0]) * c.c[..., 1]
    )


def eval_r_nsc(c: CorrelatorSet, check: bool = True):
    """Witness against a classical Bob-Charlie source.

    2<A0 B1 (C0 - C1)> + <A1 B0 (C0 + 2 C1)> - <B0>
        + <A1> (<A1 B0> + <B0 C1> + <C0> - <C1> - <A1>)
    """
    if check:
        _check_range(c)
    abc = c.abc
    a1 = c.a[..., 1]
    return (
        2 * (abc[..., 0, 1, 0] - abc[..., 0, 1, 1])
        + abc[..., 1, 0, 0] + 2 * abc[..., 1, 0, 1]
        - c.b0
        + a1 * (c.ab[..., 1, 0] + c.bc[..., 0, 1] + c.c[..., 0] - c.c[..., 1] - a1)
    )


@dataclass(frozen=True)
class WitnessReport:
    r_cns: float
    r_nsc: float

    @property
    def violated_cns(self) -> bool:
        return self.r_cns > BOUND

    @property
    def violated_nsc(self) -> bool:
        return self.r_nsc > BOUND

    @property
    def fnn_certified(self) -> bool:
        return self.violated_cns and self.violated_nsc


def fnn_verdict(r_cns: float, r_nsc: float) -> WitnessReport:
    r_cns, r_nsc = float(r_cns), float(r_nsc)
    if not (math.isfinite(r_cns) and math.isfinite(r_nsc)):
        raise ValueError("witness values must be finite")
    return WitnessReport(r_cns, r_nsc)


def evaluate_scenario(scenario) -> WitnessReport:
    corr = correlators(compute_distribution(scenario))
    return fnn_verdict(eval_r_cns(corr), eval_r_nsc(corr))


def theory_point(v1: float, v2: float, v_h: float, alpha1: float, alpha2: float) -> WitnessReport:
    return evaluate_scenario(default_paper_scenario(v1, v2, v_h, alpha1, alpha2))


# Closed forms obtained symbolically from the Born rule. In the amplitude angle
# the interference terms go as sin(2 alpha); the product-of-cosines term of the
# C-NS witness carries cos(2 alpha1) cos(2 alpha2).

def closed_form_r_cns(v1, v2, v_h, alpha1, alpha2):
    c1, c2 = np.cos(2 * alpha1), np.cos(2 * alpha2)
    s1, s2 = np.sin(2 * alpha1), np.sin(2 * alpha2)
    return (
        3 * v1 * v2 / SQRT2
        - 0.5 * v2**2 * c2**2
        + v1 * v2**2 * c2**2 / SQRT2
        - v1 * v2 * c1 * c2
        + 0.5 * v1 * v2**2 * c1 * c2
        + SQRT2 * v1 * v2 * v_h * s1 * s2
    )


def closed_form_r_nsc(v1, v2, v_h, alpha1, alpha2):
    c1, c2 = np.cos(2 * alpha1), np.cos(2 * alpha2)
    s1, s2 = np.sin(2 * alpha1), np.sin(2 * alpha2)
    return (
        3 * v1 * v2 / SQRT2
        - v1**2 * c1**2
        + v1**2 * v2 * c1**2 / SQRT2
        - v1 * v2 * c1 * c2
        + v1**2 * v2 * c1 * c2
        + SQRT2 * v1 * v2 * v_h * s1 * s2
    )


def published_r_cns(v1, v2, v_h, alpha1, alpha2):
    """The C-NS closed form exactly as printed, including its ``cos(2 v)``
    factors; kept only to quantify how far it is from the engine."""
    c1, c2 = np.cos(2 * alpha1), np.cos(2 * alpha2)
    s1, s2 = np.sin(2 * alpha1), np.sin(2 * alpha2)
    return (
        3 * v1 * v2 / SQRT2
        - 0.5 * v2**2 * c2**2
        + v1 * v2**2 * c2**2 / SQRT2
        - v1 * v2 * c1 * c2
        + 0.5 * v1 * v2**2 * np.cos(2 * v1) * np.cos(2 * v2)
        + SQRT2 * v1 * v2 * v_h * s1 * s2
    )


published_r_nsc = closed_form_r_nsc


@dataclass(frozen=True)
class CurvePoint:
    alpha1: float
    alpha2: float
    r_cns: float
    r_nsc: float
    closed_cns: float
    closed_nsc: float
    published_cns: float
    published_nsc: float

    @property
    def report(self) -> WitnessReport:
        return fnn_verdict(self.r_cns, self.r_nsc)

    @property
    def closed_form_residual(self) -> float:
        return max(abs(self.r_cns - self.closed_cns), abs(self.r_nsc - self.closed_nsc))

    @property
    def published_residual(self) -> float:
        return max(abs(self.r_cns - self.published_cns), abs(self.r_nsc - self.published_nsc))


def theory_curve(
    v1: float,
    v2: float,
    v_h: float,
    alpha1_grid: Iterable[float],
    alpha2_grid: Iterable[float],
    workers: int | None = None,
) -> list[CurvePoint]:
    """Engine values on the outer product of the two angle grids.

    Rows come back in ``alpha1``-major order regardless of ``workers``.
    """
    grid = [(float(a1), float(a2)) for a1 in alpha1_grid for a2 in alpha2_grid]
    if not grid:
        raise ValueError("empty angle grid")

    def point(ang):
        a1, a2 = ang
        rep = theory_point(v1, v2, v_h, a1, a2)
        return CurvePoint(
            a1, a2, rep.r_cns, rep.r_nsc,
            float(closed_form_r_cns(v1, v2, v_h, a1, a2)),
            float(closed_form_r_nsc(v1, v2, v_h, a1, a2)),
            float(published_r_cns(v1, v2, v_h, a1, a2)),
            float(published_r_nsc(v1, v2, v_h, a1, a2)),
        )

    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(point, grid))
    return [point(g) for g in grid]


def angle_grid(start: float, stop: float, steps: int) -> list[float]:
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if stop < start:
        raise ValueError(f"grid bounds reversed: start={start} > stop={stop}")
    if steps == 1:
        return [float(start)]
    return [float(v) for v in np.linspace(start, stop, steps)]


def violation_points(points: Sequence[CurvePoint]) -> list[CurvePoint]:
    return [pt for pt in points if pt.report.fnn_certified]


# Seesaw support: with the outer scalar factor of the quadratic term frozen,
# both witnesses are linear in p[x, z, a, b, c].

_BASIS = np.eye(48).reshape((48, 2, 2, 2, 3, 2))


def frozen_witness(c: CorrelatorSet, kind: str, gamma):
    """Witness value with the outer <C1> (C-NS) or <A1> (NS-C) replaced by ``gamma``."""
    abc = c.abc
    if kind == "cns":
        lin = (2 * (abc[..., 0, 1, 0] - abc[..., 0, 1, 1])
               + 2 * abc[..., 1, 0, 0] + abc[..., 1, 0, 1] - c.b0)
        return lin + (c.ab[..., 1, 0] + c.bc[..., 0, 0] - c.c[..., 0]) * gamma
    if kind == "nsc":
        lin = (2 * (abc[..., 0, 1, 0] - abc[..., 0, 1, 1])
               + abc[..., 1, 0, 0] + 2 * abc[..., 1, 0, 1] - c.b0)
        return lin + gamma * (c.ab[..., 1, 0] + c.bc[..., 0, 1]
                              + c.c[..., 0] - c.c[..., 1] - c.a[..., 1])
    raise ValueError(f"unknown witness kind {kind!r}")


def linearized_weights(kind: str, gamma: float) -> np.ndarray:
    """Weights ``w[x, z, a, b, c]`` with ``frozen_witness(p) == sum(w * p)``.

    Exact for no-signaling ``p``; marginal correlators are taken as averages
    over the free inputs.
    """
    corr = correlators(_BASIS, strict=False)
    return np.asarray(frozen_witness(corr, kind, gamma)).reshape(2, 2, 2, 3, 2)
