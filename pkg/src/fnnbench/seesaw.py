"""Seesaw search for the largest witness value reachable by hybrid models.

One iteration, for a fixed lambda distribution:

1. freeze the outer scalar of the quadratic term (``<C1>`` for C-NS,
   ``<A1>`` for NS-C) at ``gamma``; the witness becomes linear in the boxes
   and one LP over the box slice (all lambda at once, partner marginal tied
   across lambda) gives the best boxes;
2. set ``gamma`` to the value implied by the new partner marginal;
3. for each lambda pick the deterministic local response that maximises the
   witness, which is exact because the boxes now fix ``gamma``.

Iteration stops when the witness moves by less than ``CONVERGENCE`` or after
``iters`` rounds. The search only ever evaluates genuine hybrid models, so
every value it reports is a lower bound on the true maximum.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import simplex
from .born import correlators
from .models import (
    Model,
    build_model,
    make_rng,
    model_to_distribution,
    response_table,
    slice_constraints,
)
from .witness import eval_r_cns, eval_r_nsc, linearized_weights

log = logging.getLogger(__name__)

CONVERGENCE = 1e-10
WITNESSES = {"cns": eval_r_cns, "nsc": eval_r_nsc}


def witness_of(m: Model) -> float:
    corr = correlators(model_to_distribution(m))
    return float(WITNESSES[m.kind](corr))


def _gamma(kind: str, marginal: np.ndarray) -> float:
    # <C1> or <A1>: partner correlator at input 1
    return float(marginal[0, 1] - marginal[1, 1])


def _box_coefficients(kind: str, w: np.ndarray, weights, response) -> np.ndarray:
    """Objective coefficients on canonical boxes ``[l, b, o, s]``."""
    if kind == "cns":
        # p[x,z,a,b,c] = rho_l D[a,x,l] q[l,b,c,z]
        return np.einsum("l,axl,xzabc->lbcz", weights, response, w)
    # p[x,z,a,b,c] = rho_l q[l,a,b,x] D[c,z,l]
    return np.einsum("l,czl,xzabc->lbax", weights, response, w)


def _response_scores(kind: str, w: np.ndarray, weights, boxes) -> np.ndarray:
    """``scores[out, in, l]``: witness contribution of local output ``out`` on input ``in``."""
    if kind == "cns":
        return np.einsum("l,lbcz,xzabc->axl", weights, boxes, w)
    return np.einsum("l,lbax,xzabc->czl", weights, boxes, w)


@dataclass
class SeesawResult:
    value: float
    model: Model
    converged: bool
    iterations: int
    restart_values: list[float] = field(default_factory=list)


def _one_restart(kind, n_lambda, iters, rng):
    weights = rng.dirichlet(np.ones(n_lambda))
    choices = rng.integers(0, 4, size=n_lambda)
    if n_lambda >= 4:
        choices[:4] = rng.permutation(4)
    response = response_table(choices, n_lambda)
    gamma = float(rng.uniform(-1.0, 1.0))
    A, b = slice_constraints(n_lambda)

    best_val, best_model = -np.inf, None
    prev = None
    converged = False
    it = 0
    for it in range(1, iters + 1):
        w = linearized_weights(kind, gamma)
        c = _box_coefficients(kind, w, weights, response).ravel()
        try:
            res = simplex.maximize(c, A, b)
        except simplex.LPError as exc:
            raise RuntimeError(f"seesaw LP failed at iteration {it}: {exc}") from exc
        boxes = np.clip(res.x.reshape(n_lambda, 3, 2, 2), 0.0, None)
        marginal = boxes[0].sum(axis=0)
        gamma = _gamma(kind, marginal)

        w = linearized_weights(kind, gamma)
        scores = _response_scores(kind, w, weights, boxes)
        response = np.zeros_like(response)
        for lam in range(n_lambda):
            for inp in range(2):
                # ties go to output 0
                out = int(np.argmax(scores[:, inp, lam]))
                response[out, inp, lam] = 1.0

        model = build_model(kind, weights, response, boxes, marginal)
        val = witness_of(model)
        if val > best_val:
            best_val, best_model = val, model
        if prev is not None and abs(val - prev) < CONVERGENCE:
            converged = True
            break
        prev = val
    return best_val, best_model, converged, it


def maximize_witness(
    which: str = "cns",
    n_lambda: int = 4,
    restarts: int = 32,
    iters: int = 50,
    seed: int = 0,
) -> SeesawResult:
    """Best witness value over ``restarts`` seesaw runs.

    Restart ``r`` draws from ``make_rng(seed, r)``, so results do not depend
    on how restarts are scheduled.
    """
    kind = which.lower().replace("-", "")
    if kind not in WITNESSES:
        raise ValueError(f"which must be 'cns' or 'nsc', got {which!r}")
    for name, val in (("n_lambda", n_lambda), ("restarts", restarts), ("iters", iters)):
        if int(val) < 1:
            raise ValueError(f"{name} must be positive, got {val}")

    best = None
    values = []
    for r in range(restarts):
        val, model, conv, its = _one_restart(kind, n_lambda, iters, make_rng(seed, r))
        values.append(val)
        if not conv:
            log.info("restart %d stopped after %d iterations without converging", r, its)
        if best is None or val > best.value:
            best = SeesawResult(val, model, conv, its)
    best.restart_values = values
    return best
