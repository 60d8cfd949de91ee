"""Hybrid models with one classical and one no-signaling source.

``CnsModel``: classical lambda shared by Alice and Bob, no-signaling box
between Bob and Charlie,

    p(a,b,c|x,z) = sum_l rho(l) D(a|x,l) q_l(b,c|z).

``NscModel`` is the mirror image with the classical source on the
Bob-Charlie side. Every box must leave Bob's marginal independent of the
partner's input and must give the partner the same marginal for every
lambda; the latter is what makes the partner's statistics independent of
lambda.

Internally both box families are handled in a shared canonical order
``[lambda, b, partner_outcome, partner_input]``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import simplex
from .born import JointDistribution

TOL = 1e-10
N_BOXES_VERTICES = 3

# the four deterministic functions x -> a as (a(0), a(1))
DETERMINISTIC = ((0, 0), (0, 1), (1, 0), (1, 1))


class ModelError(ValueError):
    pass


def make_rng(seed, *key: int) -> np.random.Generator:
    """PCG64 generator for ``seed``; ``key`` derives independent sub-streams
    through ``SeedSequence(seed, spawn_key=key)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(key))))


def response_table(choices, n_lambda: int) -> np.ndarray:
    """Deterministic response ``D[out, in, lambda]`` from per-lambda index into
    ``DETERMINISTIC``."""
    d = np.zeros((2, 2, n_lambda))
    for lam, k in enumerate(choices):
        for inp, out in enumerate(DETERMINISTIC[int(k)]):
            d[out, inp, lam] = 1.0
    return d


@dataclass(frozen=True, eq=False)
class CnsModel:
    """weights[l], alice_response[a, x, l], boxes[l, b, c, z], charlie_marginal[c, z]."""

    weights: np.ndarray
    alice_response: np.ndarray
    boxes: np.ndarray
    charlie_marginal: np.ndarray

    kind = "cns"

    def __post_init__(self):
        _freeze(self, "weights", "alice_response", "boxes", "charlie_marginal")
        n = self.weights.shape[0] if self.weights.ndim == 1 else -1
        expect = {"weights": (n,), "alice_response": (2, 2, n),
                  "boxes": (n, 3, 2, 2), "charlie_marginal": (2, 2)}
        _check_shapes(self, expect)

    @property
    def n_lambda(self) -> int:
        return self.weights.shape[0]

    @property
    def response(self) -> np.ndarray:
        return self.alice_response

    @property
    def marginal(self) -> np.ndarray:
        return self.charlie_marginal

    def canonical_boxes(self) -> np.ndarray:
        return self.boxes

    def to_array(self) -> np.ndarray:
        return np.einsum("l,axl,lbcz->xzabc", self.weights, self.alice_response, self.boxes)


@dataclass(frozen=True, eq=False)
class NscModel:
    """weights[l], charlie_response[c, z, l], boxes[l, a, b, x], alice_marginal[a, x]."""

    weights: np.ndarray
    charlie_response: np.ndarray
    boxes: np.ndarray
    alice_marginal: np.ndarray

    kind = "nsc"

    def __post_init__(self):
        _freeze(self, "weights", "charlie_response", "boxes", "alice_marginal")
        n = self.weights.shape[0] if self.weights.ndim == 1 else -1
        expect = {"weights": (n,), "charlie_response": (2, 2, n),
                  "boxes": (n, 2, 3, 2), "alice_marginal": (2, 2)}
        _check_shapes(self, expect)

    @property
    def n_lambda(self) -> int:
        return self.weights.shape[0]

    @property
    def response(self) -> np.ndarray:
        return self.charlie_response

    @property
    def marginal(self) -> np.ndarray:
        return self.alice_marginal

    def canonical_boxes(self) -> np.ndarray:
        return self.boxes.transpose(0, 2, 1, 3)

    def to_array(self) -> np.ndarray:
        return np.einsum("l,labx,czl->xzabc", self.weights, self.boxes, self.charlie_response)


Model = CnsModel | NscModel


def _freeze(obj, *names):
    for name in names:
        arr = np.array(getattr(obj, name), dtype=float)
        arr.setflags(write=False)
        object.__setattr__(obj, name, arr)


def _check_shapes(obj, expect):
    for name, shape in expect.items():
        got = getattr(obj, name).shape
        if got != shape or min(shape) < 1:
            raise ModelError(f"{type(obj).__name__}.{name} has shape {got}, expected {shape}")


def build_model(kind: str, weights, response, canonical_boxes, marginal) -> Model:
    """Assemble a model from canonical-order boxes ``[l, b, o, s]``."""
    boxes = np.asarray(canonical_boxes, dtype=float)
    if kind == "cns":
        return CnsModel(weights, response, boxes, marginal)
    if kind == "nsc":
        return NscModel(weights, response, boxes.transpose(0, 2, 1, 3), marginal)
    raise ValueError(f"unknown model kind {kind!r}")


@dataclass(frozen=True)
class ModelReport:
    violations: dict[str, float]
    tol: float

    @property
    def passed(self) -> bool:
        return all(v <= self.tol for v in self.violations.values())

    @property
    def failed(self) -> list[str]:
        return sorted(k for k, v in self.violations.items() if v > self.tol)


def validate_model(m: Model, tol: float = TOL) -> ModelReport:
    """Check every model constraint and report its largest violation."""
    if not isinstance(m, (CnsModel, NscModel)):
        raise ModelError(f"not a model: {type(m).__name__}")
    q = m.canonical_boxes()
    w, d, marg = m.weights, m.response, m.marginal
    v = {}
    v["weights_nonnegative"] = float(max(0.0, -w.min()))
    v["weights_normalised"] = abs(float(w.sum()) - 1.0)
    v["response_deterministic"] = float(max(
        np.abs(d - np.round(d)).max(),
        np.abs(d.sum(axis=0) - 1.0).max(),
    ))
    v["box_nonnegative"] = float(max(0.0, -q.min()))
    v["box_normalised"] = float(np.abs(q.sum(axis=(1, 2)) - 1.0).max())
    bob = q.sum(axis=2)                                   # [l, b, s]
    v["bob_marginal_input_independent"] = float(np.abs(bob[..., 0] - bob[..., 1]).max())
    partner = q.sum(axis=1)                               # [l, o, s]
    v["shared_partner_marginal"] = float(np.abs(partner - marg[None]).max())
    v["marginal_normalised"] = float(max(np.abs(marg.sum(axis=0) - 1.0).max(),
                                         max(0.0, -marg.min())))
    return ModelReport(v, tol)


def model_to_distribution(m: Model, tol: float = TOL) -> JointDistribution:
    report = validate_model(m, tol)
    if not report.passed:
        raise ModelError(f"invalid model, violated constraints: {report.failed}")
    return JointDistribution(m.to_array())


# --- LP description of the box slice -------------------------------------

def _idx(n_lambda: int) -> np.ndarray:
    return np.arange(n_lambda * 12).reshape(n_lambda, 3, 2, 2)


def slice_constraints(n_lambda: int, marginal=None) -> tuple[np.ndarray, np.ndarray]:
    """Equality constraints on flattened canonical boxes ``q[l, b, o, s]``.

    With ``marginal`` given, every box reproduces it exactly; otherwise the
    partner marginal is left free but tied across all lambda values.
    """
    idx = _idx(n_lambda)
    nv = idx.size
    rows, rhs = [], []

    def row(plus, minus=(), value=0.0):
        r = np.zeros(nv)
        r[np.ravel(plus).astype(int)] += 1.0
        r[np.ravel(minus).astype(int)] -= 1.0
        rows.append(r)
        rhs.append(value)

    for lam in range(n_lambda):
        if marginal is None:
            for s in range(2):
                row(idx[lam, :, :, s], value=1.0)
        for b in range(3):
            row(idx[lam, b, :, 0], idx[lam, b, :, 1])
        for o in range(2):
            for s in range(2):
                if marginal is not None:
                    row(idx[lam, :, o, s], value=float(marginal[o, s]))
                elif lam > 0:
                    row(idx[lam, :, o, s], idx[0, :, o, s])
    return np.array(rows), np.array(rhs)


def random_model(n_lambda: int, seed: int, kind: str = "cns") -> Model:
    """Random point of the hybrid-model set.

    The partner marginal is drawn from a flat Dirichlet per input. Each box
    is a Dirichlet mixture of vertices of its slice, found by maximising
    seeded Gaussian objectives with the embedded simplex.
    """
    if n_lambda < 1:
        raise ValueError("n_lambda must be >= 1")
    rng = make_rng(seed)
    marginal = rng.dirichlet(np.ones(2), size=2).T          # [o, s]
    weights = rng.dirichlet(np.ones(n_lambda))
    response = response_table(rng.integers(0, 4, size=n_lambda), n_lambda)
    A, b = slice_constraints(1, marginal)
    boxes = np.empty((n_lambda, 3, 2, 2))
    for lam in range(n_lambda):
        verts = []
        for _ in range(N_BOXES_VERTICES):
            try:
                res = simplex.maximize(rng.normal(size=12), A, b)
            except simplex.InfeasibleError as exc:
                raise ModelError(f"box slice infeasible for marginal {marginal.tolist()}") from exc
            verts.append(res.x)
        mix = rng.dirichlet(np.ones(N_BOXES_VERTICES))
        box = (mix @ np.array(verts)).reshape(3, 2, 2)
        # pivoting can leave -1e-17 entries
        boxes[lam] = np.clip(box, 0.0, None)
    return build_model(kind, weights, response, boxes, marginal)


def deterministic_model(kind: str = "cns", a: int = 0, b: int = 0, c: int = 0) -> Model:
    """Single-lambda model producing the point mass on ``(a, b, c)``."""
    box = np.zeros((1, 3, 2, 2))
    partner = c if kind == "cns" else a
    local = a if kind == "cns" else c
    box[0, b, partner, :] = 1.0
    marginal = np.zeros((2, 2))
    marginal[partner, :] = 1.0
    response = response_table([3 * local], 1)
    return build_model(kind, np.ones(1), response, box, marginal)


def mix_models(m1: Model, m2: Model, t: float) -> Model:
    """Convex combination of two models sharing their partner marginal."""
    if m1.kind != m2.kind:
        raise ModelError("cannot mix models of different kinds")
    if np.abs(m1.marginal - m2.marginal).max() > TOL:
        raise ModelError("mixed models must share the partner marginal")
    weights = np.concatenate([t * m1.weights, (1 - t) * m2.weights])
    response = np.concatenate([m1.response, m2.response], axis=2)
    boxes = np.concatenate([m1.canonical_boxes(), m2.canonical_boxes()])
    return build_model(m1.kind, weights, response, boxes, m1.marginal)


def model_to_dict(m: Model) -> dict:
    resp = "alice_response" if m.kind == "cns" else "charlie_response"
    marg = "charlie_marginal" if m.kind == "cns" else "alice_marginal"
    return {
        "kind": m.kind,
        "weights": m.weights.tolist(),
        resp: m.response.tolist(),
        "boxes": m.boxes.tolist(),
        marg: m.marginal.tolist(),
    }


def model_from_dict(data: dict) -> Model:
    data = dict(data)
    kind = data.pop("kind", "cns")
    try:
        if kind == "cns":
            return CnsModel(**data)
        if kind == "nsc":
            return NscModel(**data)
    except TypeError as exc:
        raise ModelError(f"bad model fields: {exc}") from exc
    raise ModelError(f"unknown model kind {kind!r}")
