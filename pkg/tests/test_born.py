import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fnnbench.born import (
    SHAPE,
    DistributionError,
    JointDistribution,
    compute_distribution,
    correlator_arrays,
    correlators,
    validate_no_signaling,
)
from fnnbench.scenario import (
    BsmSpec,
    ObservableSpec,
    Scenario,
    SourceSpec,
    build_bsm_povm,
    build_observable,
    build_source_state,
    default_paper_scenario,
)


def _trace(ea, pi, ec, r1, r2):
    # operator O[(A,Bl,Br,C),(A',Bl',Br',C')] = ea[A,A'] pi[Bl,Br,Bl',Br'] ec[C,C']
    # state    R[(A,Bl,Br,C),(A',Bl',Br',C')] = r1[A,Bl,A',Bl'] r2[Br,C,Br',C']
    # tr(O R) = sum O[i,j] R[j,i]
    return np.einsum("ps,qrtu,vw,stpq,uwrv->", ea, pi, ec, r1, r2).real


def random_scenario(rng):
    def unit():
        v = rng.normal(size=3)
        return ObservableSpec(tuple(v / np.linalg.norm(v)))

    return Scenario(
        SourceSpec(rng.uniform(0, math.pi / 2), rng.uniform()),
        SourceSpec(rng.uniform(0, math.pi / 2), rng.uniform()),
        BsmSpec(rng.uniform()),
        (unit(), unit()),
        (unit(), unit()),
    )


def test_engine_matches_index_contraction(rng):
    for _ in range(20):
        s = random_scenario(rng)
        p = compute_distribution(s).p
        q = np.empty(SHAPE)
        r1 = build_source_state(s.source1).reshape(2, 2, 2, 2)
        r2 = build_source_state(s.source2).reshape(2, 2, 2, 2)
        povm = [pi.reshape(2, 2, 2, 2) for pi in build_bsm_povm(s.bsm)]
        for x, ox in enumerate(s.alice_settings):
            for z, oz in enumerate(s.charlie_settings):
                for a in range(2):
                    ea = (np.eye(2) + (-1) ** a * build_observable(ox)) / 2
                    for c in range(2):
                        ec = (np.eye(2) + (-1) ** c * build_observable(oz)) / 2
                        for b in range(3):
                            q[x, z, a, b, c] = _trace(ea, povm[b], ec, r1, r2)
        assert np.max(np.abs(p - q)) < 1e-13


def test_ideal_bsm_outcome_two_has_half(ideal):
    p = compute_distribution(ideal).p
    assert np.allclose(p[..., 2, :].sum(axis=(2, 3)), 0.5, atol=1e-12)
    assert np.allclose(p[..., 0, :].sum(axis=(2, 3)), 0.25, atol=1e-12)


def test_fully_mixed_sources():
    s = default_paper_scenario(0.0, 0.0, 0.7)
    p = compute_distribution(s).p
    bob = np.array([0.25, 0.25, 0.5])  # tr(Pi_b I/4)
    expect = np.broadcast_to(bob[None, :, None] / 4, (2, 3, 2))
    for x in range(2):
        for z in range(2):
            assert np.allclose(p[x, z], expect, atol=1e-14)


def test_normalisation(ideal):
    p = compute_distribution(ideal).p
    assert np.max(np.abs(p.sum(axis=(2, 3, 4)) - 1)) < 1e-12


def test_ideal_correlators(ideal):
    c = correlators(compute_distribution(ideal))
    assert abs(c.b0) < 1e-12
    assert abs(c.a[0]) < 1e-12
    assert c.abc[1, 0, 0] == pytest.approx(1 / math.sqrt(2), abs=1e-12)


def test_b0_by_brute_force(noisy):
    p = compute_distribution(noisy).p
    pb = p.sum(axis=(2, 4))
    assert correlators(p).b0 == pytest.approx(np.mean(pb[..., 0] + pb[..., 1] - pb[..., 2]), abs=1e-14)


def test_abc_b1_matches_restricted_sum(rng):
    for _ in range(10):
        p = compute_distribution(random_scenario(rng)).p
        c = correlators(p)
        for x in range(2):
            for z in range(2):
                ref = sum((-1) ** (a + b + cc) * p[x, z, a, b, cc]
                          for a in range(2) for b in range(2) for cc in range(2))
                assert c.abc[x, 1, z] == pytest.approx(ref, abs=1e-12)


def test_random_scenarios_no_signaling():
    rng = np.random.default_rng(100)
    for _ in range(100):
        d = compute_distribution(random_scenario(rng))
        rep = validate_no_signaling(d, 1e-10)
        assert rep.passed, rep.deviations


def test_per_context_marginals_agree(rng):
    for _ in range(20):
        r = correlator_arrays(compute_distribution(random_scenario(rng)).p)
        assert np.ptp(r["a"], axis=1).max() < 1e-10
        assert np.ptp(r["c"], axis=0).max() < 1e-10
        assert np.ptp(r["b"].reshape(4, 2), axis=0).max() < 1e-10


def test_signalling_counterexample():
    p = np.full(SHAPE, 1 / 12)
    # shift Alice's marginal in context z=1 by 0.1
    p[:, 1, 0] += 0.1 / 6
    p[:, 1, 1] -= 0.1 / 6
    rep = validate_no_signaling(JointDistribution(p), 1e-10)
    assert not rep.passed
    assert rep.deviations["A"] == pytest.approx(0.1, abs=1e-12)
    with pytest.raises(DistributionError, match="free inputs"):
        correlators(p)
    correlators(p, strict=False)


def test_uniform_passes():
    assert validate_no_signaling(JointDistribution.uniform()).passed


def test_validate_bad_shape():
    with pytest.raises(DistributionError):
        validate_no_signaling(np.zeros((2, 2, 2, 2, 2)))


@pytest.mark.parametrize(
    "arr,msg",
    [(np.zeros((2, 2, 2, 2)), "shape"), (np.full(SHAPE, 1 / 24), "normalised"),
     (np.where(np.arange(48).reshape(SHAPE) == 0, -1e-6, 1 / 12), "negative")],
)
def test_distribution_validation(arr, msg):
    with pytest.raises(DistributionError, match=msg):
        JointDistribution(arr)


def test_tiny_negatives_clamped():
    p = np.full(SHAPE, 1 / 12)
    p[0, 0, 0, 0, 0] = -1e-13
    p[0, 0, 0, 0, 1] = 2 / 12 + 1e-13
    assert JointDistribution(p).p.min() == 0.0


def test_distribution_is_read_only(ideal):
    d = compute_distribution(ideal)
    with pytest.raises(ValueError):
        d.p[0, 0, 0, 0, 0] = 1.0


def test_batch_correlators_match(rng):
    ps = np.stack([compute_distribution(random_scenario(rng)).p for _ in range(3)])
    batch = correlators(ps, strict=False)
    for i in range(3):
        single = correlators(ps[i])
        assert np.allclose(batch.abc[i], single.abc) and np.allclose(batch.b0[i], single.b0)


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, math.pi / 2), st.floats(0, math.pi / 2))
def test_correlators_in_range(v1, v2, vh, a1, a2):
    c = correlators(compute_distribution(default_paper_scenario(v1, v2, vh, a1, a2)))
    assert c.max_abs() <= 1 + 1e-9
