import numpy as np
import pytest

from fidelium.core.haar import SampleStream, sample_unitary
from fidelium.core.su_basis import gell_mann_basis
from fidelium.core.tensor_core import (
    DensityMatrix,
    PureState,
    as_matrix,
    dagger,
    identity,
    matmul,
    outer,
    trace,
)
from fidelium.errors import DimensionMismatchError, InvalidStateError

from helpers import SX, SY, SZ, random_rho


def _random_matrix(shape, seed):
    rng = np.random.default_rng(seed)
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def test_matmul_identity_and_zero():
    m = _random_matrix((2, 2), 1)
    np.testing.assert_allclose(matmul(identity(2), m), m)
    np.testing.assert_allclose(matmul(np.zeros((2, 2)), m), np.zeros((2, 2)))


def test_matmul_pauli_algebra():
    np.testing.assert_allclose(matmul(SX, SY), 1j * SZ, atol=1e-15)


def test_matmul_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        matmul(np.zeros((2, 3)), np.zeros((2, 3)))


def test_matmul_associative():
    a, b, c = (_random_matrix((4, 4), seed) for seed in (2, 3, 4))
    np.testing.assert_allclose(matmul(matmul(a, b), c), matmul(a, matmul(b, c)), atol=1e-10)


def test_dagger_examples():
    diagonal = np.diag([1.0, -2.0, 3.5]).astype(complex)
    np.testing.assert_array_equal(dagger(diagonal), diagonal)
    np.testing.assert_array_equal(dagger(np.array([[0, 1j], [0, 0]])), np.array([[0, 0], [-1j, 0]]))


def test_dagger_involution_and_unitarity():
    m = _random_matrix((3, 5), 5)
    np.testing.assert_array_equal(dagger(dagger(m)), m)
    u = sample_unitary(SampleStream(3, 0, 4))
    np.testing.assert_allclose(matmul(dagger(u), u), np.eye(4), atol=1e-12)


def test_trace_examples():
    assert trace(identity(5)) == 5
    assert trace(random_rho(3, 0).matrix) == pytest.approx(1.0, abs=1e-12)
    basis = gell_mann_basis(3)
    for a, ta in enumerate(basis.generators):
        for b, tb in enumerate(basis.generators):
            assert trace(matmul(ta, tb)) == pytest.approx(0.5 if a == b else 0.0, abs=1e-12)


def test_trace_non_square():
    with pytest.raises(DimensionMismatchError):
        trace(np.zeros((2, 3)))


def test_trace_is_cyclic():
    a, b = _random_matrix((3, 4), 6), _random_matrix((4, 3), 7)
    assert trace(matmul(a, b)) == pytest.approx(trace(matmul(b, a)), abs=1e-12)


def test_outer_examples():
    np.testing.assert_allclose(outer(PureState([1, 0])).matrix, np.diag([1, 0]))
    plus = PureState(np.array([1, 1]) / np.sqrt(2))
    np.testing.assert_allclose(outer(plus).matrix, np.full((2, 2), 0.5), atol=1e-15)
    psi1 = PureState(np.array([1, 1, 0]) / np.sqrt(2))
    rho = outer(psi1).matrix
    np.testing.assert_allclose(np.abs(rho[:2, :2]), np.full((2, 2), 0.5), atol=1e-15)
    assert np.all(rho[2, :] == 0) and np.all(rho[:, 2] == 0)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_outer_is_idempotent_state(d):
    rho = random_rho(d, 1).matrix
    np.testing.assert_allclose(rho @ rho, rho, atol=1e-12)
    np.testing.assert_allclose(rho, rho.conj().T, atol=1e-12)
    assert np.linalg.eigvalsh(rho)[0] >= -1e-10


def test_unnormalized_state_rejected():
    with pytest.raises(InvalidStateError):
        PureState([1.0, 1.0])
    with pytest.raises(InvalidStateError):
        PureState([np.nan, 1.0])


def test_density_matrix_invariants_enforced():
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.array([[0.5, 0.1], [0.2, 0.5]]))
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.eye(2))
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.diag([1.5, -0.5]))


def test_values_are_immutable():
    rho = random_rho(2, 2)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 0
    m = as_matrix([[1, 2], [3, 4]])
    with pytest.raises(ValueError):
        m[0, 0] = 7
