import numpy as np
import pytest

from fnnbench.born import correlators
from fnnbench.inflation import inflation_identities
from fnnbench.models import build_model, deterministic_model, model_to_distribution, random_model, response_table
from fnnbench.seesaw import maximize_witness
from fnnbench.witness import eval_r_cns, eval_r_nsc


@pytest.mark.parametrize("kind", ["cns", "nsc"])
def test_identities_on_random_models(kind):
    for seed in range(100):
        r = inflation_identities(random_model(1 + seed % 6, seed, kind))
        assert r.kind == kind
        assert r.copy_identity_residual <= 1e-12
        assert r.factorization_residual <= 1e-12
        assert r.decomposition_residual <= 1e-10
        assert r.bound_excess <= 1e-10
        assert r.copy_identity_residual >= 0 and r.factorization_residual >= 0


def test_deterministic_cns_model():
    r = inflation_identities(deterministic_model("cns"))
    assert r.p_b[0] == 1.0 and r.p_b[1:].sum() == 0.0
    assert r.terms[0] == 3.0
    assert np.isnan(r.terms[1]) and np.isnan(r.terms[2])
    assert r.decomposition == 3.0 == r.witness


def test_deterministic_nsc_model():
    r = inflation_identities(deterministic_model("nsc"))
    assert r.decomposition == pytest.approx(3.0, abs=1e-15) and r.witness == 3.0


@pytest.mark.parametrize("kind", ["cns", "nsc"])
def test_witness_matches_direct(kind):
    m = random_model(4, 123, kind)
    corr = correlators(model_to_distribution(m))
    direct = eval_r_cns(corr) if kind == "cns" else eval_r_nsc(corr)
    assert inflation_identities(m).witness == pytest.approx(float(direct), abs=1e-14)


@pytest.mark.parametrize("kind", ["cns", "nsc"])
def test_optimised_models(kind):
    m = maximize_witness(kind, restarts=4, seed=3).model
    r = inflation_identities(m)
    assert r.max_identity_residual <= 1e-12
    assert r.decomposition_residual <= 1e-10


def test_lambda_sharing_matters_for_copy_term():
    # copy term of a single outcome can be nonzero even though the total vanishes
    m = random_model(4, 2024, "cns")
    r = inflation_identities(m)
    weighted = np.nansum(r.copy_terms * r.p_b)
    assert abs(weighted) <= 1e-12


def test_rejects_non_models():
    with pytest.raises(TypeError):
        inflation_identities(object())


def test_multi_lambda_boxes_with_mixed_responses():
    rng = np.random.default_rng(8)
    base = random_model(3, 77, "cns")
    m = build_model("cns", rng.dirichlet(np.ones(3)), response_table([0, 1, 2], 3),
                    base.canonical_boxes(), base.marginal)
    r = inflation_identities(m)
    assert r.max_identity_residual <= 1e-12 and r.bound_excess <= 1e-10
