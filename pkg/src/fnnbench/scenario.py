"""Physical objects of the entanglement-swapping network.

Angle convention: a source with amplitude angle ``alpha`` emits
``cos(alpha)|HH> + sin(alpha)|VV>``; ``alpha = pi/4`` is ``|Phi+>``. A
half-wave-plate angle ``theta`` maps to ``alpha = 2 * theta``.

Basis conventions: ``|H> = (1, 0)``, ``|V> = (0, 1)``; the Bell basis is
ordered ``Phi+, Phi-, Psi+, Psi-``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernel
from .kernel import I2, X, Y, Z

KET_H = np.array([1, 0], dtype=complex)
KET_V = np.array([0, 1], dtype=complex)
KET_HH = np.kron(KET_H, KET_H)
KET_HV = np.kron(KET_H, KET_V)
KET_VH = np.kron(KET_V, KET_H)
KET_VV = np.kron(KET_V, KET_V)

PHI_PLUS = (KET_HH + KET_VV) / math.sqrt(2)
PHI_MINUS = (KET_HH - KET_VV) / math.sqrt(2)
PSI_PLUS = (KET_HV + KET_VH) / math.sqrt(2)
PSI_MINUS = (KET_HV - KET_VH) / math.sqrt(2)
BELL_BASIS = (PHI_PLUS, PHI_MINUS, PSI_PLUS, PSI_MINUS)

UNIT_TOL = 1e-9


def _check_unit_interval(name: str, value: float) -> float:
    value = float(value)
    if not (0.0 <= value <= 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


@dataclass(frozen=True)
class SourceSpec:
    """Noisy two-qubit source: amplitude angle in ``[0, pi/2]`` and visibility."""

    alpha: float
    visibility: float

    def __post_init__(self):
        a = float(self.alpha)
        if not (-1e-12 <= a <= math.pi / 2 + 1e-12):
            raise ValueError(f"alpha must lie in [0, pi/2], got {a}")
        _check_unit_interval("visibility", self.visibility)


@dataclass(frozen=True)
class BsmSpec:
    hom_visibility: float

    def __post_init__(self):
        _check_unit_interval("hom_visibility", self.hom_visibility)


@dataclass(frozen=True)
class ObservableSpec:
    """Dichotomic qubit observable given by its Bloch vector ``(nx, ny, nz)``."""

    bloch: tuple[float, float, float]

    def __post_init__(self):
        n = tuple(float(v) for v in self.bloch)
        if len(n) != 3:
            raise ValueError("bloch vector needs three components")
        if abs(math.sqrt(sum(v * v for v in n)) - 1.0) > UNIT_TOL:
            raise ValueError(f"bloch vector must have unit norm, got {n}")
        object.__setattr__(self, "bloch", n)


S = 1 / math.sqrt(2)
DEFAULT_ALICE = (ObservableSpec((1.0, 0.0, 0.0)), ObservableSpec((0.0, 0.0, 1.0)))
DEFAULT_CHARLIE = (ObservableSpec((S, 0.0, S)), ObservableSpec((-S, 0.0, S)))

MEASURED_V1 = 0.9710
MEASURED_V2 = 0.9860
MEASURED_VH = 0.943


@dataclass(frozen=True)
class Scenario:
    source1: SourceSpec
    source2: SourceSpec
    bsm: BsmSpec
    alice_settings: tuple[ObservableSpec, ObservableSpec] = field(default=DEFAULT_ALICE)
    charlie_settings: tuple[ObservableSpec, ObservableSpec] = field(default=DEFAULT_CHARLIE)

    def __post_init__(self):
        for name in ("alice_settings", "charlie_settings"):
            settings = tuple(getattr(self, name))
            if len(settings) != 2 or not all(isinstance(o, ObservableSpec) for o in settings):
                raise ValueError(f"{name} needs exactly two ObservableSpec entries")
            object.__setattr__(self, name, settings)


def build_source_state(s: SourceSpec) -> np.ndarray:
    """``v |phi(alpha)><phi(alpha)| + (1 - v) I/4`` on two qubits."""
    ket = math.cos(s.alpha) * KET_HH + math.sin(s.alpha) * KET_VV
    v = s.visibility
    return v * kernel.projector(ket) + (1 - v) / 4 * np.eye(4, dtype=complex)


def build_bsm_povm(b: BsmSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Partial Bell-state measurement with imperfect HOM interference.

    Outcome 0 ~ Phi+, 1 ~ Phi-, 2 ~ the Psi subspace. With ``v_h < 1`` the
    two Phi outcomes blur into each other.
    """
    vh = b.hom_visibility
    pp = kernel.projector(PHI_PLUS)
    pm = kernel.projector(PHI_MINUS)
    mix = (1 - vh) / 2 * (pp + pm)
    pi0 = vh * pp + mix
    pi1 = vh * pm + mix
    pi2 = np.eye(4, dtype=complex) - pi0 - pi1
    return pi0, pi1, pi2


def build_observable(o: ObservableSpec) -> np.ndarray:
    nx, ny, nz = o.bloch
    return nx * X + ny * Y + nz * Z


def parse_angle(value) -> float:
    """Accept raw radians or a multiple of pi written like ``"0.25pi"``."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        text = value.strip().replace(" ", "")
        if text.endswith("pi"):
            coeff = text[:-2]
            if coeff in ("", "+"):
                return math.pi
            if coeff == "-":
                return -math.pi
            if coeff.endswith("*"):
                coeff = coeff[:-1]
            if "/" in coeff:
                num, den = coeff.split("/", 1)
                if float(den) == 0:
                    raise ValueError(f"zero denominator in angle {value!r}")
                return float(num or 1) / float(den) * math.pi
            return float(coeff) * math.pi
        return float(text)
    raise ValueError(f"cannot parse angle {value!r}")


def default_paper_scenario(
    v1: float = MEASURED_V1,
    v2: float = MEASURED_V2,
    v_h: float = MEASURED_VH,
    alpha1: float = math.pi / 4,
    alpha2: float = math.pi / 4,
) -> Scenario:
    """Scenario with the X/Z and (Z+-X)/sqrt2 settings and the given noise."""
    return Scenario(
        source1=SourceSpec(alpha1, v1),
        source2=SourceSpec(alpha2, v2),
        bsm=BsmSpec(v_h),
    )


def ideal_scenario() -> Scenario:
    return default_paper_scenario(1.0, 1.0, 1.0)


__all__ = [
    "BELL_BASIS",
    "BsmSpec",
    "I2",
    "ObservableSpec",
    "MEASURED_V1",
    "MEASURED_V2",
    "MEASURED_VH",
    "PHI_MINUS",
    "PHI_PLUS",
    "PSI_MINUS",
    "PSI_PLUS",
    "Scenario",
    "SourceSpec",
    "build_bsm_povm",
    "build_observable",
    "build_source_state",
    "default_paper_scenario",
    "ideal_scenario",
    "parse_angle",
]
