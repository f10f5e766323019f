import numpy as np
import pytest

from fidelium.config import get_settings
from fidelium.core.channels import weyl_operators
from fidelium.core.designs import (
    StateDesign,
    _run_restart,
    design_from_bloch,
    nonuple_d3,
    octahedron_d2,
    overlap_matrix,
    povm_elements,
    require_verified,
    simplex_search,
    tetrahedron_d2,
    verify_design,
)
from fidelium.core.su_basis import bloch_vector, gell_mann_basis
from fidelium.core.tensor_core import PureState, outer
from fidelium.errors import (
    DesignVerificationError,
    DimensionMismatchError,
    InvalidParameterError,
    InvalidStateError,
    OptimizerFailureError,
)


def _perturbed_tetrahedron() -> StateDesign:
    design = tetrahedron_d2()
    states = np.array(design.states)
    states[0] = states[0] + np.array([1e-3, 0])
    states[0] /= np.linalg.norm(states[0])
    return StateDesign(2, design.weights, states, source="perturbed")


def _off_diagonal(matrix: np.ndarray) -> np.ndarray:
    return matrix[~np.eye(matrix.shape[0], dtype=bool)]


def test_tetrahedron_geometry():
    design = tetrahedron_d2()
    basis = gell_mann_basis(2)
    vectors = np.array([bloch_vector(outer(psi), basis).components for psi in design.pure_states()])
    np.testing.assert_allclose(vectors[0], np.ones(3) / np.sqrt(3), atol=1e-15)
    np.testing.assert_allclose(_off_diagonal(vectors @ vectors.T), -1.0 / 3.0, atol=1e-14)
    np.testing.assert_allclose(_off_diagonal(overlap_matrix(design)), 1.0 / 3.0, atol=1e-14)
    assert design.is_minimal


def test_tetrahedron_verifies():
    residuals = verify_design(tetrahedron_d2()).residuals()
    assert set(residuals) == {
        "weight_normalization", "first_moment", "second_moment", "bloch_dot", "state_overlap", "povm_completeness"
    }
    assert max(residuals.values()) < 1e-14


def test_nonuple_structure():
    design = nonuple_d3()
    assert len(design) == 9 and design.is_minimal
    np.testing.assert_allclose(design.states[0], np.array([1, 1, 0]) / np.sqrt(2), atol=1e-15)
    np.testing.assert_array_equal(np.count_nonzero(np.abs(design.states) > 1e-12, axis=1), 2)
    np.testing.assert_allclose(_off_diagonal(overlap_matrix(design)), 0.25, atol=1e-14)
    assert verify_design(design).max_residual < 1e-12


def test_octahedron_is_a_design_but_not_minimal():
    design = octahedron_d2()
    report = verify_design(design)
    assert report.first_moment < 1e-14
    assert report.second_moment < 1e-14
    assert report.bloch_dot is None and report.state_overlap is None
    assert not design.is_minimal


def test_design_from_bloch_axes():
    axes = np.vstack([np.eye(3), -np.eye(3)])
    design = design_from_bloch(axes, [1.0 / 6] * 6, gell_mann_basis(2))
    assert verify_design(design).max_residual < 1e-14


def test_perturbed_design_fails():
    report = verify_design(_perturbed_tetrahedron())
    assert report.second_moment > 1e-8
    assert "second_moment" in report.violations(1e-8)
    with pytest.raises(DesignVerificationError) as error:
        require_verified(_perturbed_tetrahedron(), 1e-8)
    assert error.value.context["residual"] in report.violations(1e-8)


def test_design_validation():
    with pytest.raises(InvalidStateError):
        StateDesign(2, [0.5, 0.5], [[1, 0], [1, 1]])
    with pytest.raises(DimensionMismatchError):
        StateDesign(2, [1.0], [[1, 0, 0]])
    with pytest.raises(InvalidParameterError):
        StateDesign(2, [1.5, -0.5], [[1, 0], [0, 1]])


def test_duplicates_are_reported_not_rejected():
    design = StateDesign(2, [0.25] * 4, [[1, 0]] * 4)
    report = verify_design(design)
    assert report.state_overlap == pytest.approx(2.0 / 3.0)
    assert not report.passes(1e-8)


def test_povm_elements():
    elements = povm_elements(tetrahedron_d2())
    np.testing.assert_allclose(elements.sum(axis=0), np.eye(2), atol=1e-14)
    nonuple = povm_elements(nonuple_d3())
    np.testing.assert_allclose(np.trace(nonuple, axis1=1, axis2=2), 1.0 / 3.0, atol=1e-15)
    assert all(np.linalg.eigvalsh(element)[0] >= -1e-12 for element in nonuple)
    with pytest.raises(InvalidParameterError):
        povm_elements(octahedron_d2())


@pytest.mark.parametrize("d", [2, 3, 4])
def test_simplex_search(d):
    design = simplex_search(d, seed=0)
    assert design.is_minimal
    assert design.source.startswith("search(seed=0")
    assert verify_design(design).passes(1e-8)
    np.testing.assert_allclose(_off_diagonal(overlap_matrix(design)), 1.0 / (d + 1), atol=1e-8)
    # Weyl-Heisenberg orbit of the first state
    np.testing.assert_allclose(design.states, weyl_operators(d) @ design.states[0], atol=1e-14)


@pytest.mark.slow
@pytest.mark.parametrize("d", [5, 6])
def test_simplex_search_larger_dimensions(d):
    design = simplex_search(d, seed=0)
    assert verify_design(design).passes(1e-8)


def test_simplex_search_is_deterministic():
    first = simplex_search(3, seed=4, restarts=8)
    np.testing.assert_array_equal(first.states, simplex_search(3, seed=4, restarts=8).states)
    np.testing.assert_array_equal(first.states, simplex_search(3, seed=4, restarts=8, workers=3).states)


def test_simplex_search_keeps_the_best_restart():
    d, seed, restarts = 3, 0, 8
    displacements = weyl_operators(d)
    deviations = [
        _run_restart(i, d, seed, get_settings().search_max_iter, displacements).max_deviation for i in range(restarts)
    ]
    design = simplex_search(d, seed=seed, restarts=restarts)
    assert design.source == f"search(seed={seed}, restart={int(np.argmin(deviations))})"
    assert np.max(np.abs(_off_diagonal(overlap_matrix(design)) - 0.25)) == pytest.approx(min(deviations), abs=1e-12)


def test_simplex_search_failure_reports_best_residual():
    with pytest.raises(OptimizerFailureError) as error:
        simplex_search(3, seed=0, tol=1e-300, restarts=2, max_iter=2)
    context = error.value.context
    assert context["best_residual"] > 0
    assert context["best_restart"] in (0, 1)


def test_simplex_search_arguments():
    with pytest.raises(InvalidParameterError):
        simplex_search(1, seed=0)
    with pytest.raises(InvalidParameterError):
        simplex_search(2, seed=0, restarts=0)


def test_pure_states_round_trip():
    design = nonuple_d3()
    assert all(isinstance(psi, PureState) for psi in design.pure_states())
    assert design.density_matrices().shape == (9, 3, 3)
