"""Numerical checks of the inflation argument behind the bound of 3.

For a C-NS model the inflated network keeps one classical lambda, copies it
to two Bobs, and gives the second Bob-Charlie pair an independent copy of
the no-signaling box (same lambda, fresh box):

    Q(a,b,b',c,c'|x,z,z') = sum_l rho(l) D(a|x,l) q_l(b,c|z) q_l(b',c'|z').

The witness then splits by Bob's outcome as ``sum_b p_b T_b``. NS-C models
are handled in mirror form with a copied Alice and terms ``S_b``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .born import SIGN_AC, SIGN_B, correlators
from .models import CnsModel, Model, NscModel, model_to_distribution
from .witness import eval_r_cns, eval_r_nsc

ONES = np.ones(2)
P_MIN = 1e-12


@dataclass(frozen=True)
class InflationReport:
    kind: str
    copy_identity_residual: float     # |<A1 (C1' - C1)>_Q| or |<(A1' - A1) C0>_Q|
    factorization_residual: float     # max |<A_x B_y C'_z>_Q - <A_x B_y><C_z>| (or mirror)
    p_b: np.ndarray
    terms: np.ndarray                 # T_b or S_b; nan where p_b vanishes
    copy_terms: np.ndarray            # conditional <A1 (C1' - C1)>_b (or mirror)
    witness: float
    decomposition: float

    @property
    def max_identity_residual(self) -> float:
        return max(self.copy_identity_residual, self.factorization_residual)

    @property
    def decomposition_residual(self) -> float:
        return abs(self.decomposition - self.witness)

    @property
    def bound_excess(self) -> float:
        """max_b (T_b - 3 - copy_b); the inequality chain needs this <= 0."""
        ok = self.p_b > P_MIN
        if not ok.any():
            return -np.inf
        return float(np.max(self.terms[ok] - 3.0 - self.copy_terms[ok]))


def _sign(flag: bool) -> np.ndarray:
    return SIGN_AC if flag else ONES


def _cns(m: CnsModel) -> InflationReport:
    rho, d, q = m.weights, m.alice_response, m.boxes
    # Q[x, z, w, a, b, c, c'] with Bob' summed out; w is the input of C'
    qc = q.sum(axis=1)                                          # [l, c', w]
    Q = np.einsum("l,axl,lbcz,lew->xzwabce", rho, d, q, qc)

    def ev(x, z, w, A=False, C=False, Cp=False):
        return np.einsum("abce,a,c,e->b", Q[x, z, w], _sign(A), _sign(C), _sign(Cp))

    p_b = ev(0, 0, 0)
    a0c0 = ev(0, 0, 0, A=True, C=True)
    a0c1 = ev(0, 1, 1, A=True, C=True)
    a1c0 = ev(1, 0, 0, A=True, C=True)
    a1c1 = ev(1, 1, 1, A=True, C=True)
    a1cp1 = ev(1, 1, 1, A=True, Cp=True)
    c0cp1 = ev(0, 0, 1, C=True, Cp=True)

    num = np.empty(3)
    for b in (0, 1):
        num[b] = (2 * (-1) ** b * (a0c0[b] - a0c1[b])
                  + 2 * a1c0[b] + a1c1[b] + a1cp1[b] - p_b[b])
    num[2] = p_b[2] - (2 * a1c0[2] + a1c1[2] + a1cp1[2] + 2 * c0cp1[2])
    copy_num = a1cp1 - a1c1

    corr = correlators(model_to_distribution(m))
    fact = 0.0
    for x in range(2):
        for z in range(2):
            cz = ev(x, z, z, A=True, Cp=True)
            for y in range(2):
                lhs = float(SIGN_B[y] @ cz)
                fact = max(fact, abs(lhs - corr.ab[x, y] * corr.c[z]))
    return _report("cns", p_b, num, copy_num, fact, float(eval_r_cns(corr)))


def _nsc(m: NscModel) -> InflationReport:
    rho, d, q = m.weights, m.charlie_response, m.boxes
    # Q[x, u, z, a, a', b, c] with Bob' summed out; u is the input of A'
    qa = q.sum(axis=2)                                          # [l, a', u]
    Q = np.einsum("l,labx,leu,czl->xuzaebc", rho, q, qa, d)

    def ev(x, u, z, A=False, Ap=False, C=False):
        return np.einsum("aebc,a,e,c->b", Q[x, u, z], _sign(A), _sign(Ap), _sign(C))

    p_b = ev(0, 0, 0)
    a0c0 = ev(0, 0, 0, A=True, C=True)
    a0c1 = ev(0, 0, 1, A=True, C=True)
    a1c0 = ev(1, 1, 0, A=True, C=True)
    a1c1 = ev(1, 1, 1, A=True, C=True)
    ap1c0 = ev(1, 1, 0, Ap=True, C=True)
    ap1c1 = ev(1, 1, 1, Ap=True, C=True)
    a1ap1 = ev(1, 1, 0, A=True, Ap=True)

    num = np.empty(3)
    for b in (0, 1):
        num[b] = (2 * (-1) ** b * (a0c0[b] - a0c1[b])
                  + a1c0[b] + 2 * a1c1[b] + ap1c0[b] - p_b[b])
    num[2] = p_b[2] - (a1c0[2] + 2 * a1c1[2] + 2 * a1ap1[2] + 2 * ap1c1[2] - ap1c0[2])
    copy_num = ap1c0 - a1c0

    corr = correlators(model_to_distribution(m))
    fact = 0.0
    for x in range(2):
        for z in range(2):
            az = ev(x, x, z, Ap=True, C=True)
            for y in range(2):
                lhs = float(SIGN_B[y] @ az)
                fact = max(fact, abs(lhs - corr.a[x] * corr.bc[y, z]))
    return _report("nsc", p_b, num, copy_num, fact, float(eval_r_nsc(corr)))


def _report(kind, p_b, num, copy_num, fact, witness) -> InflationReport:
    with np.errstate(divide="ignore", invalid="ignore"):
        ok = p_b > P_MIN
        terms = np.where(ok, num / np.where(ok, p_b, 1.0), np.nan)
        copy_terms = np.where(ok, copy_num / np.where(ok, p_b, 1.0), np.nan)
    return InflationReport(
        kind=kind,
        copy_identity_residual=abs(float(copy_num.sum())),
        factorization_residual=float(fact),
        p_b=p_b,
        terms=terms,
        copy_terms=copy_terms,
        witness=witness,
        decomposition=float(num.sum()),
    )


def inflation_identities(m: Model) -> InflationReport:
    """Inflation identities, per-outcome terms and the decomposition check."""
    if isinstance(m, CnsModel):
        return _cns(m)
    if isinstance(m, NscModel):
        return _nsc(m)
    raise TypeError(f"expected a CnsModel or NscModel, got {type(m).__name__}")
