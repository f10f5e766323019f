"""Dense complex linear algebra carriers and primitives.

Matrices are plain ``numpy`` complex128 arrays made read-only at construction;
the state types validate their invariants once, when they are built.
"""
from dataclasses import InitVar, dataclass
from typing import Any

import numpy as np
import numpy.typing as npt

from fidelium.config import get_settings
from fidelium.errors import DimensionMismatchError, InvalidStateError, NotUnitaryError

Complex = complex
ComplexMatrix = npt.NDArray[np.complex128]


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def as_matrix(data: Any) -> ComplexMatrix:
    """Coerce to an immutable 2-D complex matrix with finite entries."""
    matrix = np.array(data, dtype=np.complex128)
    if matrix.ndim != 2 or 0 in matrix.shape:
        raise DimensionMismatchError("expected a non-empty 2-D matrix", shape=list(matrix.shape))
    if not np.all(np.isfinite(matrix)):
        raise InvalidStateError("matrix has non-finite entries")
    return _frozen(matrix)


def identity(d: int) -> ComplexMatrix:
    return _frozen(np.eye(d, dtype=np.complex128))


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: ComplexMatrix
    tol: InitVar[float | None] = None

    def __post_init__(self, tol: float | None):
        tol = get_settings().validity_tol if tol is None else tol
        amplitudes = np.array(self.amplitudes, dtype=np.complex128)
        if amplitudes.ndim != 1 or amplitudes.size == 0:
            raise DimensionMismatchError("state amplitudes must be a non-empty vector", shape=list(amplitudes.shape))
        if not np.all(np.isfinite(amplitudes)):
            raise InvalidStateError("state has non-finite amplitudes")
        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1.0) > tol:
            raise InvalidStateError("state is not normalized", norm_squared=norm, tol=tol)
        object.__setattr__(self, "amplitudes", _frozen(amplitudes))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: ComplexMatrix
    tol: InitVar[float | None] = None

    def __post_init__(self, tol: float | None):
        settings = get_settings()
        tol = settings.validity_tol if tol is None else tol
        matrix = as_matrix(self.matrix)
        if matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError("density matrix must be square", shape=list(matrix.shape))
        hermiticity = float(np.max(np.abs(matrix - matrix.conj().T)))
        if hermiticity > tol:
            raise InvalidStateError("density matrix is not Hermitian", residual=hermiticity, tol=tol)
        tr = complex(np.trace(matrix))
        if abs(tr - 1.0) > tol:
            raise InvalidStateError("density matrix trace is not 1", trace=[tr.real, tr.imag], tol=tol)
        smallest = float(np.linalg.eigvalsh(matrix)[0])
        if smallest < -settings.psd_floor:
            raise InvalidStateError("density matrix is not positive semidefinite", min_eigenvalue=smallest)
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def matmul(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatchError("inner dimensions differ", left=list(a.shape), right=list(b.shape))
    return _frozen(np.asarray(a, dtype=np.complex128) @ np.asarray(b, dtype=np.complex128))


def dagger(a: ComplexMatrix) -> ComplexMatrix:
    return _frozen(np.ascontiguousarray(np.conj(a).T, dtype=np.complex128))


def trace(a: ComplexMatrix) -> Complex:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError("trace of a non-square matrix", shape=list(a.shape))
    return complex(np.trace(a))


def outer(psi: PureState) -> DensityMatrix:
    """Rank-1 projector |psi><psi|."""
    if not isinstance(psi, PureState):
        psi = PureState(psi)
    amplitudes = psi.amplitudes
    return DensityMatrix(np.outer(amplitudes, amplitudes.conj()))


def unitarity_residual(u: ComplexMatrix) -> float:
    """Frobenius norm of U^dagger U - 1."""
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionMismatchError("unitary must be square", shape=list(u.shape))
    return float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])))


def require_unitary(u: ComplexMatrix, tol: float | None = None) -> ComplexMatrix:
    tol = get_settings().derived_tol if tol is None else tol
    u = as_matrix(u)
    residual = unitarity_residual(u)
    if residual > tol:
        raise NotUnitaryError("matrix is not unitary", residual=residual, tol=tol)
    return u


def maximally_mixed(d: int) -> DensityMatrix:
    return DensityMatrix(np.eye(d, dtype=np.complex128) / d)
