"""Generalized Gell-Mann generators of SU(d), Bloch vectors and the adjoint map.

Generator ordering is fixed for every dimension: first the symmetric
off-diagonal generators for index pairs (j, k), j < k, in lexicographic
order, then the antisymmetric ones in the same pair order, then the d - 1
diagonal generators. Every Bloch vector component refers to this order.
"""
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np
import numpy.typing as npt

from fidelium.config import get_settings
from fidelium.core.tensor_core import ComplexMatrix, DensityMatrix, require_unitary
from fidelium.errors import DimensionMismatchError, InvalidParameterError, InvalidStateError

RealVector = npt.NDArray[np.float64]
RealMatrix = npt.NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class GeneratorBasis:
    dim: int
    generators: ComplexMatrix  # shape (d^2 - 1, d, d)
    k_d: float

    def __len__(self) -> int:
        return self.generators.shape[0]

    def labels(self) -> list[str]:
        pairs = list(combinations(range(self.dim), 2))
        return (
            [f"sym({j},{k})" for j, k in pairs]
            + [f"asym({j},{k})" for j, k in pairs]
            + [f"diag({l})" for l in range(1, self.dim)]
        )


@dataclass(frozen=True, eq=False)
class BlochVector:
    dim: int
    components: RealVector

    def norm(self) -> float:
        return float(np.linalg.norm(self.components))


@dataclass(frozen=True, eq=False)
class AdjointMatrix:
    """Real orthogonal matrix with ``matrix[b, a] = 2 tr(T_b U T_a U^dagger)``.

    Stored so that Bloch vectors transform as ``n' = matrix @ n`` and
    ``adjoint_rep(U V) == adjoint_rep(U) @ adjoint_rep(V)``.
    """

    dim: int
    matrix: RealMatrix

    def apply(self, n: BlochVector) -> BlochVector:
        return BlochVector(n.dim, self.matrix @ n.components)


@lru_cache(maxsize=32)
def gell_mann_basis(d: int) -> GeneratorBasis:
    if d < 2:
        raise InvalidParameterError("generator basis needs d >= 2", dim=d)
    pairs = list(combinations(range(d), 2))
    generators = np.zeros((d * d - 1, d, d), dtype=np.complex128)
    index = 0
    for j, k in pairs:
        generators[index, j, k] = generators[index, k, j] = 0.5
        index += 1
    for j, k in pairs:
        generators[index, j, k] = -0.5j
        generators[index, k, j] = 0.5j
        index += 1
    for l in range(1, d):
        diagonal = np.zeros(d)
        diagonal[:l] = 1.0
        diagonal[l] = -l
        generators[index] = np.diag(diagonal * np.sqrt(2.0 / (l * (l + 1))) / 2)
        index += 1
    generators.setflags(write=False)
    return GeneratorBasis(dim=d, generators=generators, k_d=float(np.sqrt(2.0 * (d - 1) / d)))


def _check_dim(dim: int, basis: GeneratorBasis):
    if dim != basis.dim:
        raise DimensionMismatchError("dimension does not match generator basis", dim=dim, basis_dim=basis.dim)


def bloch_components(matrix: ComplexMatrix, basis: GeneratorBasis) -> RealVector:
    """n^a = (2/k_d) tr(M T_a) for an arbitrary Hermitian matrix (or a stack of them)."""
    traces = np.einsum("...ij,aji->...a", matrix, basis.generators)
    return np.real(traces) * (2.0 / basis.k_d)


def bloch_vector(rho: DensityMatrix, basis: GeneratorBasis) -> BlochVector:
    _check_dim(rho.dim, basis)
    return BlochVector(basis.dim, bloch_components(rho.matrix, basis))


def bloch_matrix(components: RealVector, basis: GeneratorBasis) -> ComplexMatrix:
    """1/d + k_d n.T without any positivity check."""
    d = basis.dim
    return np.eye(d) / d + basis.k_d * np.tensordot(components, basis.generators, axes=(-1, 0))


def state_from_bloch(n: BlochVector, basis: GeneratorBasis) -> DensityMatrix:
    _check_dim(n.dim, basis)
    components = np.asarray(n.components, dtype=np.float64)
    if components.shape != (len(basis),):
        raise DimensionMismatchError(
            "Bloch vector has the wrong number of components", components=components.shape[0], expected=len(basis)
        )
    matrix = bloch_matrix(components, basis)
    smallest = float(np.linalg.eigvalsh(matrix)[0])
    floor = get_settings().psd_floor
    if smallest < -floor:
        raise InvalidStateError(
            "Bloch vector does not describe a state", min_eigenvalue=smallest, floor=-floor
        )
    return DensityMatrix(matrix)


def adjoint_matrix(u: ComplexMatrix, basis: GeneratorBasis) -> RealMatrix:
    """Adjoint matrix (or stack of them) without the unitarity check."""
    u = np.asarray(u)
    conjugated = np.einsum("...ij,ajk,...lk->...ail", u, basis.generators, u.conj(), optimize=True)
    # matrix[b, a] = 2 Re tr(T_b U T_a U^dagger)
    return 2.0 * np.real(np.einsum("bji,...aij->...ba", basis.generators, conjugated))


def adjoint_rep(u: ComplexMatrix, basis: GeneratorBasis) -> AdjointMatrix:
    u = require_unitary(u)
    _check_dim(u.shape[0], basis)
    return AdjointMatrix(basis.dim, adjoint_matrix(u, basis))
