"""Born-rule distribution p(a,b,c|x,z) and its correlators.

Arrays are indexed ``p[x, z, a, b, c]`` with ``x, z, a, c`` in {0, 1} and
``b`` in {0, 1, 2}. The correlator helpers accept arbitrary leading batch
axes so bootstrap resamples can be evaluated in one call.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernel
from .scenario import (
    Scenario,
    build_bsm_povm,
    build_observable,
    build_source_state,
)

SHAPE = (2, 2, 2, 3, 2)
NEG_TOL = 1e-12
NORM_TOL = 1e-10
NS_TOL = 1e-10
RANGE_TOL = 1e-9

SIGN_AC = np.array([1.0, -1.0])
# B_0 = Pi_0 + Pi_1 - Pi_2 and B_1 = Pi_0 - Pi_1
SIGN_B = np.array([[1.0, 1.0, -1.0], [1.0, -1.0, 0.0]])


class DistributionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """p[x, z, a, b, c]; negative round-off above ``-1e-12`` is clamped to zero."""

    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.shape != SHAPE:
            raise DistributionError(f"distribution must have shape {SHAPE}, got {p.shape}")
        if not np.all(np.isfinite(p)):
            raise DistributionError("distribution has non-finite entries")
        if p.min() < -NEG_TOL:
            raise DistributionError(f"negative probability {p.min():.3e}")
        p = np.clip(p, 0.0, None)
        norms = p.sum(axis=(2, 3, 4))
        if np.max(np.abs(norms - 1.0)) > NORM_TOL:
            raise DistributionError(f"contexts not normalised: {norms.ravel()}")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    def __getitem__(self, idx):
        return self.p[idx]

    @classmethod
    def uniform(cls) -> "JointDistribution":
        return cls(np.full(SHAPE, 1 / 12))

    @classmethod
    def point_mass(cls, a: int = 0, b: int = 0, c: int = 0) -> "JointDistribution":
        p = np.zeros(SHAPE)
        p[:, :, a, b, c] = 1.0
        return cls(p)


def _effect(observable: np.ndarray, outcome: int) -> np.ndarray:
    return 0.5 * (np.eye(2) + (-1) ** outcome * observable)


def compute_distribution(s: Scenario) -> JointDistribution:
    """Evaluate tr[(E_a|x (x) Pi_b (x) E_c|z) (rho_1 (x) rho_2)] for all cells.

    Qubit order is Alice, Bob-left, Bob-right, Charlie, so the state is simply
    ``kron(rho_1, rho_2)``.
    """
    state = kernel.kron(build_source_state(s.source1), build_source_state(s.source2))
    povm = build_bsm_povm(s.bsm)
    alice = [build_observable(o) for o in s.alice_settings]
    charlie = [build_observable(o) for o in s.charlie_settings]
    p = np.empty(SHAPE)
    for x in range(2):
        for z in range(2):
            for a in range(2):
                ea = _effect(alice[x], a)
                for b in range(3):
                    for c in range(2):
                        op = kernel.kron(ea, povm[b], _effect(charlie[z], c))
                        p[x, z, a, b, c] = kernel.trace(op @ state).real
    return JointDistribution(p)


@dataclass(frozen=True)
class NoSignalingReport:
    deviations: dict[str, float]
    tol: float

    @property
    def max_deviation(self) -> float:
        return max(self.deviations.values())

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tol


def _spread(arr: np.ndarray, axis) -> float:
    return float(np.max(arr.max(axis=axis) - arr.min(axis=axis)))


def validate_no_signaling(d, tol: float = NS_TOL) -> NoSignalingReport:
    """Maximum dependence of each party's (and each adjacent pair's) marginal
    on the inputs of the other parties."""
    p = d.p if isinstance(d, JointDistribution) else np.asarray(d, dtype=float)
    if p.shape != SHAPE:
        raise DistributionError(f"distribution must have shape {SHAPE}, got {p.shape}")
    pa = p.sum(axis=(3, 4))        # [x, z, a]
    pc = p.sum(axis=(2, 3))        # [x, z, c]
    pb = p.sum(axis=(2, 4))        # [x, z, b]
    pab = p.sum(axis=4)            # [x, z, a, b]
    pbc = p.sum(axis=2)            # [x, z, b, c]
    devs = {
        "A": _spread(pa, axis=1),
        "B": _spread(pb.reshape(4, 3), axis=0),
        "C": _spread(pc, axis=0),
        "AB": _spread(pab, axis=1),
        "BC": _spread(pbc, axis=0),
    }
    return NoSignalingReport(devs, tol)


@dataclass(frozen=True, eq=False)
class CorrelatorSet:
    """Correlators with index order ``a[x]``, ``ab[x, y]``, ``bc[y, z]``,
    ``ac[x, z]``, ``abc[x, y, z]``; ``y`` selects B_0 or B_1.

    Fields are numpy arrays and may carry extra leading batch axes.
    """

    a: np.ndarray
    c: np.ndarray
    b0: np.ndarray
    b1: np.ndarray
    ab: np.ndarray
    bc: np.ndarray
    ac: np.ndarray
    abc: np.ndarray

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(getattr(self, f)))) for f in
                   ("a", "c", "b0", "b1", "ab", "bc", "ac", "abc"))


def correlator_arrays(p: np.ndarray) -> dict[str, np.ndarray]:
    """Per-context correlators, before any averaging over free inputs.

    Returned arrays keep the input axes ``x, z`` even where a correlator does
    not depend on them.
    """
    p = np.asarray(p, dtype=float)
    sa, sc = SIGN_AC, SIGN_AC
    return {
        "a": np.einsum("...xzabc,a->...xz", p, sa),
        "c": np.einsum("...xzabc,c->...xz", p, sc),
        "b": np.einsum("...xzabc,yb->...xzy", p, SIGN_B),
        "ab": np.einsum("...xzabc,a,yb->...xzy", p, sa, SIGN_B),
        "bc": np.einsum("...xzabc,yb,c->...xzy", p, SIGN_B, sc),
        "ac": np.einsum("...xzabc,a,c->...xz", p, sa, sc),
        "abc": np.einsum("...xzabc,a,yb,c->...xyz", p, sa, SIGN_B, sc),
    }


def correlators(d, strict: bool = True, tol: float = NS_TOL) -> CorrelatorSet:
    """Correlators of a distribution.

    Marginal correlators are evaluated in every input context and averaged
    over the inputs they do not depend on. With ``strict`` the contexts must
    agree within ``tol`` first; pass ``strict=False`` for empirical
    frequencies, which are only approximately no-signaling.
    """
    p = d.p if isinstance(d, JointDistribution) else np.asarray(d, dtype=float)
    if p.shape[-5:] != SHAPE:
        raise DistributionError(f"distribution must end in shape {SHAPE}, got {p.shape}")
    r = correlator_arrays(p)
    if strict:
        checks = {
            "<A_x>": _spread(r["a"], axis=-1),
            "<C_z>": _spread(r["c"], axis=-2),
            "<B_y>": _spread(r["b"].reshape(r["b"].shape[:-3] + (4, 2)), axis=-2),
            "<A_x B_y>": _spread(r["ab"], axis=-2),
            "<B_y C_z>": _spread(r["bc"], axis=-3),
        }
        bad = {k: v for k, v in checks.items() if v > tol}
        if bad:
            raise DistributionError(f"marginal correlators depend on free inputs: {bad}")
    b = r["b"].mean(axis=(-3, -2))
    return CorrelatorSet(
        a=r["a"].mean(axis=-1),
        c=r["c"].mean(axis=-2),
        b0=b[..., 0],
        b1=b[..., 1],
        ab=r["ab"].mean(axis=-2),
        bc=np.swapaxes(r["bc"].mean(axis=-3), -1, -2),
        ac=r["ac"],
        abc=r["abc"],
    )
