"""Weighted isotropic state sets and the minimal d^2-state simplex designs.

A design {(c_r, psi_r)} reproduces the Haar first and second moments of
Bloch vectors: sum_r c_r n_r = 0 and sum_r c_r n_r n_r^T = 1/(d^2 - 1).
For d^2 equal-weight states this forces every pairwise overlap to be
1/(d + 1) and the projectors rho_r / d form a POVM.
"""
import logging
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import numpy.typing as npt
from scipy.optimize import least_squares

from fidelium.config import get_settings
from fidelium.core.channels import weyl_operators
from fidelium.core.haar import SampleStream
from fidelium.core.su_basis import GeneratorBasis, bloch_components, bloch_matrix, gell_mann_basis
from fidelium.core.tensor_core import PureState
from fidelium.errors import (
    DesignVerificationError,
    DimensionMismatchError,
    InvalidParameterError,
    OptimizerFailureError,
)
from fidelium.workers import run_ordered

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class StateDesign:
    dim: int
    weights: npt.NDArray[np.float64]
    states: npt.NDArray[np.complex128]  # shape (n, d), one normalized state per row
    source: str = field(default="custom", compare=False)

    def __post_init__(self):
        weights = np.array(self.weights, dtype=np.float64)
        states = np.array(self.states, dtype=np.complex128)
        if states.ndim != 2 or states.shape[1] != self.dim:
            raise DimensionMismatchError("design states must be rows of length d", dim=self.dim, shape=list(states.shape))
        if weights.shape != (states.shape[0],):
            raise DimensionMismatchError("one weight per state", weights=weights.shape[0], states=states.shape[0])
        if np.any(weights <= 0):
            raise InvalidParameterError("design weights must be positive")
        for row in states:
            PureState(row)
        weights.setflags(write=False)
        states.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "states", states)

    def __len__(self) -> int:
        return self.states.shape[0]

    @property
    def is_minimal(self) -> bool:
        return len(self) == self.dim**2 and bool(np.allclose(self.weights, 1.0 / self.dim**2, rtol=0, atol=1e-12))

    def density_matrices(self) -> np.ndarray:
        return np.einsum("ri,rj->rij", self.states, self.states.conj())

    def pure_states(self) -> list[PureState]:
        return [PureState(row) for row in self.states]


def overlap_matrix(design: StateDesign) -> np.ndarray:
    """|<psi_r|psi_s>|^2 for all pairs."""
    return np.abs(design.states.conj() @ design.states.T) ** 2


def design_from_bloch(vectors, weights, basis: GeneratorBasis, source: str = "custom") -> StateDesign:
    """States recovered as the principal eigenvectors of 1/d + k_d n.T."""
    states = []
    for n in np.asarray(vectors, dtype=np.float64):
        _, eigenvectors = np.linalg.eigh(bloch_matrix(n, basis))
        state = eigenvectors[:, -1]
        # fix the global phase: first nonzero amplitude real positive
        pivot = state[np.argmax(np.abs(state) > 1e-12)]
        states.append(state * (abs(pivot) / pivot))
    return StateDesign(basis.dim, np.asarray(weights, dtype=np.float64), np.array(states), source=source)


def tetrahedron_d2() -> StateDesign:
    n1 = np.array([1.0, 1.0, 1.0]) / math.sqrt(3)
    n2 = np.array([-1.0, -1.0, 1.0]) / math.sqrt(3)
    vectors = [n1, n2, np.roll(n2, 1), np.roll(n2, 2)]
    return design_from_bloch(vectors, [0.25] * 4, gell_mann_basis(2), source="tetrahedron_d2")


def octahedron_d2() -> StateDesign:
    s = 1.0 / math.sqrt(2)
    states = [[s, s], [s, -s], [s, 1j * s], [s, -1j * s], [1, 0], [0, 1]]
    return StateDesign(2, [1.0 / 6] * 6, states, source="octahedron_d2")


def nonuple_d3() -> StateDesign:
    omega = np.exp(2j * np.pi / 3)
    seeds = [np.array([1, omega**r, 0]) / math.sqrt(2) for r in range(3)]
    states = [np.roll(state, shift) for shift in range(3) for state in seeds]
    return StateDesign(3, [1.0 / 9] * 9, states, source="nonuple_d3")


@dataclass(frozen=True)
class DesignVerification:
    dim: int
    size: int
    weight_normalization: float
    first_moment: float
    second_moment: float
    bloch_dot: float | None  # only for d^2-element designs
    state_overlap: float | None  # only for d^2-element designs
    povm_completeness: float

    def residuals(self) -> dict[str, float]:
        values = {
            "weight_normalization": self.weight_normalization,
            "first_moment": self.first_moment,
            "second_moment": self.second_moment,
            "bloch_dot": self.bloch_dot,
            "state_overlap": self.state_overlap,
            "povm_completeness": self.povm_completeness,
        }
        return {name: value for name, value in values.items() if value is not None}

    @property
    def max_residual(self) -> float:
        return max(self.residuals().values())

    def violations(self, tol: float) -> dict[str, float]:
        return {name: value for name, value in self.residuals().items() if value > tol}

    def passes(self, tol: float) -> bool:
        return not self.violations(tol)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "size": self.size, "residuals": self.residuals(), "max_residual": self.max_residual}


def verify_design(design: StateDesign, basis: GeneratorBasis | None = None) -> DesignVerification:
    """Residuals of every isotropy condition; never raises on a bad design."""
    basis = gell_mann_basis(design.dim) if basis is None else basis
    if basis.dim != design.dim:
        raise DimensionMismatchError("design and basis dimensions differ", design_dim=design.dim, basis_dim=basis.dim)
    d = design.dim
    weights = design.weights
    rhos = design.density_matrices()
    vectors = bloch_components(rhos, basis)

    first = weights @ vectors
    second = np.einsum("r,ra,rb->ab", weights, vectors, vectors)
    generators = d * d - 1
    bloch_dot = state_overlap = None
    if len(design) == d * d:
        pairs = np.array(list(combinations(range(len(design)), 2)))
        dots = np.sum(vectors[pairs[:, 0]] * vectors[pairs[:, 1]], axis=1)
        overlaps = overlap_matrix(design)[pairs[:, 0], pairs[:, 1]]
        bloch_dot = float(np.max(np.abs(dots + 1.0 / generators)))
        state_overlap = float(np.max(np.abs(overlaps - 1.0 / (d + 1))))
    completeness = np.einsum("r,rij->ij", weights * d, rhos) - np.eye(d)

    return DesignVerification(
        dim=d,
        size=len(design),
        weight_normalization=float(abs(weights.sum() - 1.0)),
        first_moment=float(np.max(np.abs(first))),
        second_moment=float(np.max(np.abs(second - np.eye(generators) / generators))),
        bloch_dot=bloch_dot,
        state_overlap=state_overlap,
        povm_completeness=float(np.linalg.norm(completeness)),
    )


def require_verified(design: StateDesign, tol: float | None = None) -> DesignVerification:
    tol = get_settings().design_tol if tol is None else tol
    report = verify_design(design)
    violations = report.violations(tol)
    if violations:
        name, value = max(violations.items(), key=lambda item: item[1])
        raise DesignVerificationError(
            f"design fails verification: {name} residual {value:.3e} exceeds {tol:.1e}",
            residual=name, value=value, tol=tol, violations=violations,
        )
    return report


def povm_elements(design: StateDesign) -> np.ndarray:
    """O_r = rho_r / d for a minimal equal-weight design."""
    if not design.is_minimal:
        raise InvalidParameterError(
            "POVM elements need a d^2-element design with weights 1/d^2", dim=design.dim, size=len(design)
        )
    return design.density_matrices() / design.dim


# Weyl-Heisenberg fiducial search


def _fiducial(x: np.ndarray, d: int) -> np.ndarray:
    psi = x[:d] + 1j * x[d:]
    return psi / np.linalg.norm(psi)


def _overlap_residuals(x: np.ndarray, displacements: np.ndarray, target: float) -> np.ndarray:
    d = displacements.shape[1]
    psi = _fiducial(x, d)
    expectations = np.einsum("i,pij,j->p", psi.conj(), displacements[1:], psi)
    return np.abs(expectations) ** 2 - target


@dataclass(frozen=True)
class RestartResult:
    index: int
    max_deviation: float
    x: np.ndarray = field(repr=False)


def _run_restart(index: int, d: int, seed: int, max_iter: int, displacements: np.ndarray) -> RestartResult:
    start = SampleStream(seed, index, d).complex_gaussians(d)
    x0 = np.concatenate([start.real, start.imag])
    target = 1.0 / (d + 1)
    result = least_squares(
        _overlap_residuals, x0, args=(displacements, target),
        method="trf", jac="3-point", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_iter,
    )
    deviation = float(np.max(np.abs(_overlap_residuals(result.x, displacements, target))))
    logger.debug(f"Simplex search d={d} restart {index}: max deviation {deviation:.3e} ({result.nfev} evaluations)")
    return RestartResult(index, deviation, result.x)


def simplex_search(
    d: int,
    seed: int,
    tol: float | None = None,
    restarts: int | None = None,
    max_iter: int | None = None,
    workers: int | None = None,
) -> StateDesign:
    """Weyl-Heisenberg orbit {X^p Z^q psi} of a numerically found fiducial.

    Every restart in the budget runs; the one with the smallest maximum
    overlap deviation wins, ties going to the lowest restart index, so the
    result depends on the seed and budget but not on the worker count.
    """
    if d < 2:
        raise InvalidParameterError("simplex search needs d >= 2", dim=d)
    settings = get_settings()
    tol = settings.search_tol if tol is None else tol
    restarts = settings.search_restarts if restarts is None else restarts
    if restarts < 1:
        raise InvalidParameterError("simplex search needs at least one restart", restarts=restarts)
    max_iter = settings.search_max_iter if max_iter is None else max_iter
    workers = settings.workers if workers is None else workers
    displacements = weyl_operators(d)
    logger.info(f"Simplex search: d={d}, seed={seed}, tol={tol:.1e}, restarts={restarts}, workers={workers}")

    jobs = [(i, d, seed, max_iter, displacements) for i in range(restarts)]
    results = run_ordered(_run_restart, jobs, workers)
    best = min(results, key=lambda result: (result.max_deviation, result.index))
    if best.max_deviation <= tol:
        logger.info(f"Simplex search d={d}: restart {best.index} is best at {best.max_deviation:.3e}")
        psi = _fiducial(best.x, d)
        return StateDesign(
            d, np.full(d * d, 1.0 / d**2), displacements @ psi,
            source=f"search(seed={seed}, restart={best.index})",
        )

    raise OptimizerFailureError(
        f"simplex search for d={d} did not reach {tol:.1e} in {restarts} restarts",
        dim=d, seed=seed, best_residual=best.max_deviation, best_restart=best.index, restarts=restarts,
    )
