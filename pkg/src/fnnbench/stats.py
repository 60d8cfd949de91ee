"""Finite-statistics experiments: multinomial sampling and bootstrap errors.

Random numbers come from numpy's PCG64 bit generator. ``seed`` alone drives
the main stream; bootstrap resample ``i`` of a run seeded with ``seed`` uses
``SeedSequence(seed, spawn_key=(1, i))``; sweep point ``k``, repetition
``r`` uses ``SeedSequence(seed, spawn_key=(2, k, r))``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .born import SHAPE, JointDistribution, correlators
from .models import make_rng
from .witness import BOUND, eval_r_cns, eval_r_nsc

log = logging.getLogger(__name__)

DEFAULT_RESAMPLES = 1000


class EmptyContextError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CountTable:
    """Event counts ``n[x, z, a, b, c]``."""

    n: np.ndarray

    def __post_init__(self):
        n = np.array(self.n)
        if n.shape != SHAPE:
            raise ValueError(f"counts must have shape {SHAPE}, got {n.shape}")
        if not np.issubdtype(n.dtype, np.integer):
            if not np.all(n == np.round(n)):
                raise ValueError("counts must be integers")
            n = n.astype(np.int64)
        if n.min() < 0:
            raise ValueError("counts must be nonnegative")
        n = n.astype(np.int64)
        n.setflags(write=False)
        object.__setattr__(self, "n", n)

    @property
    def total(self) -> int:
        return int(self.n.sum())

    @property
    def context_totals(self) -> np.ndarray:
        return self.n.sum(axis=(2, 3, 4))

    @classmethod
    def from_events(cls, events) -> "CountTable":
        """Tally an iterable of ``(x, z, a, b, c)`` records."""
        n = np.zeros(SHAPE, dtype=np.int64)
        for ev in events:
            n[tuple(int(v) for v in ev)] += 1
        return cls(n)


def sample_counts(d: JointDistribution, total: int, seed: int) -> CountTable:
    """``total`` i.i.d. trials with uniformly random inputs ``(x, z)``."""
    if int(total) < 1:
        raise ValueError(f"total must be >= 1, got {total}")
    if not isinstance(d, JointDistribution):
        d = JointDistribution(d)
    probs = (d.p / 4.0).ravel()
    probs = probs / probs.sum()
    n = make_rng(seed).multinomial(int(total), probs)
    return CountTable(n.reshape(SHAPE))


def empirical_distribution(c: CountTable) -> np.ndarray:
    totals = c.context_totals
    if np.any(totals == 0):
        empty = [tuple(int(i) for i in idx) for idx in np.argwhere(totals == 0)]
        raise EmptyContextError(f"no events in input contexts (x, z) = {empty}")
    return c.n / totals[:, :, None, None, None]


def _witnesses(p: np.ndarray):
    corr = correlators(p, strict=False)
    return eval_r_cns(corr, check=False), eval_r_nsc(corr, check=False)


@dataclass(frozen=True)
class EstimateReport:
    r_cns_hat: float
    r_nsc_hat: float
    se_cns: float
    se_nsc: float
    total: int
    resamples: int

    @property
    def sigma_cns(self) -> float:
        return sigma_distance(self.r_cns_hat, self.se_cns)

    @property
    def sigma_nsc(self) -> float:
        return sigma_distance(self.r_nsc_hat, self.se_nsc)

    def to_dict(self) -> dict:
        return {
            "r_cns_hat": self.r_cns_hat,
            "r_nsc_hat": self.r_nsc_hat,
            "se_cns": self.se_cns,
            "se_nsc": self.se_nsc,
            "sigma_cns": self.sigma_cns,
            "sigma_nsc": self.sigma_nsc,
            "total": self.total,
            "resamples": self.resamples,
        }


def sigma_distance(r_hat: float, se: float, bound: float = BOUND) -> float:
    """Distance above ``bound`` in standard errors (+-inf or nan when se == 0)."""
    if se > 0:
        return (r_hat - bound) / se
    diff = r_hat - bound
    return math.copysign(math.inf, diff) if diff != 0 else math.nan


def estimate_witnesses(
    c: CountTable,
    bootstrap_resamples: int = DEFAULT_RESAMPLES,
    seed: int = 0,
) -> EstimateReport:
    """Plug-in witness estimates with bootstrap standard errors.

    Each resample redraws every input context multinomially with its
    observed size and frequencies; the reported standard error is the
    sample standard deviation (ddof=1) of the witness over the resamples.
    """
    if bootstrap_resamples < 100:
        raise ValueError("bootstrap_resamples must be >= 100")
    if c.total == 0:
        raise EmptyContextError("count table is empty")
    freq = empirical_distribution(c)
    r_cns, r_nsc = _witnesses(freq)

    totals = c.context_totals
    boot = np.empty((bootstrap_resamples,) + SHAPE)
    for i in range(bootstrap_resamples):
        rng = make_rng(seed, 1, i)
        for x in range(2):
            for z in range(2):
                draw = rng.multinomial(int(totals[x, z]), freq[x, z].ravel())
                boot[i, x, z] = draw.reshape(2, 3, 2) / totals[x, z]
    b_cns, b_nsc = _witnesses(boot)
    return EstimateReport(
        r_cns_hat=float(r_cns),
        r_nsc_hat=float(r_nsc),
        se_cns=float(np.std(b_cns, ddof=1)),
        se_nsc=float(np.std(b_nsc, ddof=1)),
        total=c.total,
        resamples=int(bootstrap_resamples),
    )


@dataclass(frozen=True)
class SweepPoint:
    index: int
    params: dict
    estimates: list[EstimateReport]


def sweep_experiment(
    distributions: Sequence[JointDistribution],
    total: int,
    seed: int,
    repetitions: int = 1,
    bootstrap_resamples: int = DEFAULT_RESAMPLES,
    params: Sequence[dict] | None = None,
) -> list[SweepPoint]:
    """Simulate ``repetitions`` experiments at every point of a scenario family."""
    if not len(distributions):
        raise ValueError("empty sweep grid")
    if int(total) < 1:
        raise ValueError(f"total must be >= 1, got {total}")
    out = []
    for k, d in enumerate(distributions):
        reps = []
        for r in range(repetitions):
            sub = int(np.random.SeedSequence(seed, spawn_key=(2, k, r)).generate_state(1, np.uint64)[0])
            counts = sample_counts(d, total, sub)
            reps.append(estimate_witnesses(counts, bootstrap_resamples, sub))
        out.append(SweepPoint(k, dict(params[k]) if params else {}, reps))
    return out
