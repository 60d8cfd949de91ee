import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fnnbench.kernel import I2, X, Z, as_matrix, check_hermitian_psd, dagger, kron, matmul, projector, trace
from fnnbench.scenario import PHI_PLUS

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def cmat(n):
    return st.tuples(arrays(float, (n, n), elements=finite), arrays(float, (n, n), elements=finite)).map(
        lambda ri: ri[0] + 1j * ri[1]
    )


def test_kron_identity():
    assert np.array_equal(kron(I2, I2), np.eye(4))


def test_bell_stabilizer():
    out = matmul(kron(X, X), PHI_PLUS)
    assert np.allclose(out.ravel(), PHI_PLUS, atol=1e-15)


def test_kron_dimension_law():
    assert kron(np.ones((2, 2)), np.ones((4, 4))).shape == (8, 8)
    assert kron(np.ones((2, 3)), np.ones((4, 1))).shape == (8, 3)


def test_trace_examples():
    assert trace(np.eye(4)) == 4
    assert abs(trace(projector(PHI_PLUS)) - 1) < 1e-15


def test_matmul_examples():
    assert np.allclose(matmul(X, X), I2)
    ket0 = np.array([[1], [0]])
    assert np.allclose(matmul(Z, ket0), ket0)
    o = (Z + X) / math.sqrt(2)
    assert np.allclose(matmul(o, o), I2, atol=1e-15)


def test_matmul_mismatch():
    with pytest.raises(ValueError, match="inner dimensions"):
        matmul(np.eye(2), np.eye(3))


def test_trace_non_square():
    with pytest.raises(ValueError, match="square"):
        trace(np.ones((2, 3)))


@pytest.mark.parametrize("bad", [np.array([[np.nan, 0], [0, 1]]), np.array([[np.inf]])])
def test_non_finite_rejected(bad):
    with pytest.raises(ValueError, match="non-finite"):
        kron(bad, I2)


def test_empty_rejected():
    with pytest.raises(ValueError):
        as_matrix(np.zeros((0, 2)))


def test_check_examples():
    r = check_hermitian_psd(np.eye(4) / 4)
    assert r.is_hermitian and r.is_psd and r.max_asymmetry == 0
    r = check_hermitian_psd(np.diag([1.0, -0.1]))
    assert r.is_hermitian and not r.is_psd
    assert r.min_eigenvalue == pytest.approx(-0.1)
    r = check_hermitian_psd(X + 1j * I2)
    assert not r.is_hermitian and r.max_asymmetry == pytest.approx(2.0)


def test_check_non_square():
    with pytest.raises(ValueError):
        check_hermitian_psd(np.ones((2, 4)))


def test_dagger():
    m = np.array([[1, 2j], [3, 4]])
    assert np.array_equal(dagger(m), np.array([[1, 3], [-2j, 4]]))


@given(cmat(2), cmat(2), cmat(2))
def test_kron_associative(a, b, c):
    lhs, rhs = kron(kron(a, b), c), kron(a, kron(b, c))
    assert np.allclose(lhs, rhs, rtol=0, atol=1e-12 * max(1.0, np.abs(lhs).max()))


@given(cmat(2), cmat(2))
def test_trace_of_kron_factorises(a, b):
    assert trace(kron(a, b)) == pytest.approx(trace(a) * trace(b), rel=1e-12, abs=1e-9)


@given(cmat(4), cmat(4))
def test_trace_cyclic(m, n):
    scale = max(1.0, np.abs(m).max() * np.abs(n).max() * 16)
    assert abs(trace(matmul(m, n)) - trace(matmul(n, m))) <= 1e-12 * scale


@given(cmat(4))
def test_hermitian_part_is_hermitian(a):
    assert check_hermitian_psd((a + dagger(a)) / 2).is_hermitian
