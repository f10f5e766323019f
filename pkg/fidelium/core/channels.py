"""Trace-preserving maps in Kraus form."""
import logging
from dataclasses import InitVar, dataclass
from functools import cached_property
from typing import Any

import numpy as np

from fidelium.config import get_settings
from fidelium.core.haar import SampleStream, orthonormal_columns
from fidelium.core.tensor_core import ComplexMatrix, DensityMatrix, require_unitary
from fidelium.errors import DimensionMismatchError, InvalidParameterError, TracePreservationError

logger = logging.getLogger(__name__)


def tp_defect(kraus_ops: np.ndarray) -> float:
    """Frobenius norm of sum_i K_i^dagger K_i - 1."""
    d = kraus_ops.shape[-1]
    gram = np.einsum("kji,kjl->il", kraus_ops.conj(), kraus_ops)
    return float(np.linalg.norm(gram - np.eye(d)))


@dataclass(frozen=True, eq=False)
class KrausChannel:
    kraus_ops: ComplexMatrix  # shape (k, d, d)
    tp_tol: InitVar[float | None] = None

    def __post_init__(self, tp_tol: float | None):
        tp_tol = get_settings().channel_tp_tol if tp_tol is None else tp_tol
        ops = np.array(self.kraus_ops, dtype=np.complex128)
        if ops.ndim == 2:
            ops = ops[np.newaxis]
        if ops.ndim != 3 or ops.shape[0] == 0 or ops.shape[1] != ops.shape[2]:
            raise DimensionMismatchError("Kraus operators must be a nonempty list of square matrices", shape=list(ops.shape))
        if not np.all(np.isfinite(ops)):
            raise InvalidParameterError("Kraus operators have non-finite entries")
        residual = tp_defect(ops)
        if residual > tp_tol:
            raise TracePreservationError("channel is not trace preserving", residual=residual, tol=tp_tol)
        ops.setflags(write=False)
        object.__setattr__(self, "kraus_ops", ops)

    @property
    def dim(self) -> int:
        return self.kraus_ops.shape[1]

    @property
    def rank(self) -> int:
        return self.kraus_ops.shape[0]

    @cached_property
    def tp_residual(self) -> float:
        return tp_defect(self.kraus_ops)


def tp_residual(channel: KrausChannel) -> float:
    return channel.tp_residual


def _check_dim(channel: KrausChannel, dim: int):
    if channel.dim != dim:
        raise DimensionMismatchError("channel and operand dimensions differ", channel_dim=channel.dim, dim=dim)


def apply_operator(channel: KrausChannel, matrix: Any) -> np.ndarray:
    """Kraus sum on any d x d matrix (or stack of them); linearity makes this well defined."""
    matrix = np.asarray(matrix, dtype=np.complex128)
    _check_dim(channel, matrix.shape[-1])
    k = channel.kraus_ops
    return np.einsum("kij,...jl,kml->...im", k, matrix, k.conj(), optimize=True)


def apply(channel: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    _check_dim(channel, rho.dim)
    tol = get_settings().validity_tol + channel.tp_residual
    return DensityMatrix(apply_operator(channel, rho.matrix), tol=tol)


def apply_extended(channel: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    """(E x id)(rho) on the bipartite space, E acting on the first factor."""
    d = channel.dim
    if rho.dim != d * d:
        raise DimensionMismatchError("extended application needs a d^2-dimensional state", channel_dim=d, dim=rho.dim)
    extended = np.stack([np.kron(k, np.eye(d)) for k in channel.kraus_ops])
    out = np.einsum("kij,jl,kml->im", extended, rho.matrix, extended.conj(), optimize=True)
    return DensityMatrix(out, tol=get_settings().validity_tol + d * channel.tp_residual)


def identity_channel(d: int) -> KrausChannel:
    return KrausChannel(np.eye(d, dtype=np.complex128))


def unitary_channel(v: ComplexMatrix) -> KrausChannel:
    return KrausChannel(require_unitary(v))


def shift_operator(d: int) -> np.ndarray:
    """X|j> = |j+1 mod d>."""
    return np.roll(np.eye(d, dtype=np.complex128), 1, axis=0)


def clock_operator(d: int) -> np.ndarray:
    """Z|j> = w^j |j>, w = exp(2 pi i / d)."""
    return np.diag(np.exp(2j * np.pi * np.arange(d) / d))


def weyl_operators(d: int) -> np.ndarray:
    """The d^2 operators X^p Z^q, index p * d + q."""
    x, z = shift_operator(d), clock_operator(d)
    powers_x = [np.linalg.matrix_power(x, p) for p in range(d)]
    powers_z = [np.linalg.matrix_power(z, q) for q in range(d)]
    return np.stack([xp @ zq for xp in powers_x for zq in powers_z])


def depolarizing(d: int, p: float) -> KrausChannel:
    """rho -> (1 - p) rho + p 1/d, realized on the Weyl operator set."""
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError("depolarizing probability must lie in [0, 1]", p=p)
    ops = weyl_operators(d) * (np.sqrt(p) / d)
    ops[0] = np.eye(d) * np.sqrt(1.0 - p + p / d**2)
    return KrausChannel(ops)


def dephasing(d: int, p: float) -> KrausChannel:
    """rho -> (1 - p) rho + p Z rho Z^dagger with Z the clock operator."""
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError("dephasing probability must lie in [0, 1]", p=p)
    return KrausChannel(np.stack([np.sqrt(1.0 - p) * np.eye(d), np.sqrt(p) * clock_operator(d)]))


def random_channel(d: int, k: int, seed: int) -> KrausChannel:
    """k Kraus blocks of an isometry built from a (k d) x d complex Gaussian matrix."""
    if k < 1 or d < 1:
        raise InvalidParameterError("random channel needs d >= 1 and k >= 1", dim=d, k=k)
    gaussians = SampleStream(seed, 0, d).complex_gaussians(k * d * d).reshape(k * d, d)
    isometry = orthonormal_columns(gaussians)
    return KrausChannel(isometry.reshape(k, d, d))


def precompose_gate(channel: KrausChannel, u: ComplexMatrix) -> KrausChannel:
    """The channel rho -> E(U^dagger rho U)."""
    u = require_unitary(u)
    _check_dim(channel, u.shape[0])
    tp_tol = get_settings().channel_tp_tol + channel.tp_residual
    return KrausChannel(channel.kraus_ops @ u.conj().T, tp_tol=tp_tol)


def compose(outer: KrausChannel, inner: KrausChannel) -> KrausChannel:
    """The channel rho -> outer(inner(rho))."""
    _check_dim(outer, inner.dim)
    ops = np.einsum("aij,bjk->abik", outer.kraus_ops, inner.kraus_ops).reshape(-1, inner.dim, inner.dim)
    return KrausChannel(ops, tp_tol=get_settings().channel_tp_tol + outer.tp_residual + inner.tp_residual)
