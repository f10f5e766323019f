"""Haar sampling of pure states and unitaries from counter-based streams.

Sample ``counter`` of a stream keyed by ``seed`` is drawn from a Philox
generator with key ``seed`` whose counter starts at ``counter * stride``,
where ``stride`` is the number of 4-word Philox blocks one sample consumes.
A contiguous range of samples therefore reads one contiguous run of the
Philox output, and the batched samplers return exactly what the
sample-by-sample ones would.

Gaussians come from uniforms by the Box-Muller transform: a uniform is the
top 53 bits of a 64-bit word, each consecutive word pair (u1, u2) gives
r = sqrt(-2 ln(1 - u1)), and the complex Gaussian (r cos 2pi u2 + i r sin 2pi u2) / sqrt(2).
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from fidelium.config import get_settings
from fidelium.core.su_basis import adjoint_matrix, gell_mann_basis
from fidelium.core.tensor_core import ComplexMatrix, PureState
from fidelium.errors import InvalidParameterError
from fidelium.workers import run_ordered, shard_ranges

logger = logging.getLogger(__name__)

# Samples per vectorized chunk; bounds the memory of stacked adjoint matrices
CHUNK = 10_000


def _stride(count: int) -> int:
    """Philox blocks needed for `count` complex Gaussians (two words each)."""
    return math.ceil(2 * count / 4)


def complex_gaussians(seed: int, start: int, stop: int, count: int) -> npt.NDArray[np.complex128]:
    """Rows start..stop-1 of the stream, `count` standard complex Gaussians each."""
    if seed < 0:
        raise InvalidParameterError("seed must be non-negative", seed=seed)
    stride = _stride(count)
    generator = np.random.Philox(key=seed, counter=start * stride)
    words = generator.random_raw((stop - start) * stride * 4).reshape(stop - start, stride * 4)[:, : 2 * count]
    uniforms = (words >> np.uint64(11)).astype(np.float64) * 2.0**-53
    radius = np.sqrt(-2.0 * np.log1p(-uniforms[:, 0::2]))
    angle = 2.0 * np.pi * uniforms[:, 1::2]
    return radius * np.exp(1j * angle) / np.sqrt(2.0)


@dataclass(frozen=True)
class SampleStream:
    seed: int
    counter: int
    dim: int

    def __post_init__(self):
        if self.seed < 0 or self.counter < 0 or self.dim < 1:
            raise InvalidParameterError(
                "sample streams need seed >= 0, counter >= 0, dim >= 1",
                seed=self.seed, counter=self.counter, dim=self.dim,
            )

    def complex_gaussians(self, count: int) -> npt.NDArray[np.complex128]:
        return complex_gaussians(self.seed, self.counter, self.counter + 1, count)[0]

    def at(self, counter: int) -> "SampleStream":
        return SampleStream(self.seed, counter, self.dim)


def _normalize_rows(vectors: np.ndarray) -> np.ndarray:
    return vectors / np.linalg.norm(vectors, axis=-1, keepdims=True)


def orthonormal_columns(gaussians: np.ndarray) -> np.ndarray:
    """Q factor of (a stack of) tall matrices with diag(R) made real positive."""
    q, r = np.linalg.qr(gaussians)
    diagonal = np.diagonal(r, axis1=-2, axis2=-1)
    phases = diagonal / np.abs(diagonal)
    return q * phases[..., np.newaxis, :]


def sample_pure_states(seed: int, start: int, stop: int, dim: int) -> npt.NDArray[np.complex128]:
    return _normalize_rows(complex_gaussians(seed, start, stop, dim))


def sample_unitaries(seed: int, start: int, stop: int, dim: int) -> npt.NDArray[np.complex128]:
    gaussians = complex_gaussians(seed, start, stop, dim * dim).reshape(stop - start, dim, dim)
    return orthonormal_columns(gaussians)


def sample_pure_state(stream: SampleStream) -> PureState:
    return PureState(sample_pure_states(stream.seed, stream.counter, stream.counter + 1, stream.dim)[0])


def sample_unitary(stream: SampleStream) -> ComplexMatrix:
    u = sample_unitaries(stream.seed, stream.counter, stream.counter + 1, stream.dim)[0]
    u.setflags(write=False)
    return u


@dataclass(frozen=True)
class OrthogonalityReport:
    dim: int
    n_samples: int
    seed: int
    first_moment_max: float
    second_moment_max: float
    first_moment_rms: float
    second_moment_rms: float
    standard_error_scale: float

    @property
    def threshold(self) -> float:
        return 5.0 * self.standard_error_scale

    @property
    def passed(self) -> bool:
        return max(self.first_moment_max, self.second_moment_max) < self.threshold

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "first_moment_max": self.first_moment_max,
            "second_moment_max": self.second_moment_max,
            "first_moment_rms": self.first_moment_rms,
            "second_moment_rms": self.second_moment_rms,
            "standard_error_scale": self.standard_error_scale,
            "threshold": self.threshold,
            "passed": self.passed,
        }


def _moment_sums(seed: int, start: int, stop: int, dim: int) -> tuple[np.ndarray, np.ndarray]:
    basis = gell_mann_basis(dim)
    first = np.zeros((len(basis), len(basis)))
    second = np.zeros((len(basis) ** 2, len(basis) ** 2))
    for chunk_start in range(start, stop, CHUNK):
        chunk_stop = min(stop, chunk_start + CHUNK)
        ad = adjoint_matrix(sample_unitaries(seed, chunk_start, chunk_stop, dim), basis)
        flat = ad.reshape(chunk_stop - chunk_start, -1)
        first += ad.sum(axis=0)
        second += flat.T @ flat
    return first, second


def mc_orthogonality_check(d: int, n_samples: int, seed: int, workers: int | None = None) -> OrthogonalityReport:
    """Empirical first and second moments of Ad U against their Haar values.

    The first moment should vanish and E[Ad_{ba} Ad_{dc}] should equal
    delta_ac delta_bd / (d^2 - 1).
    """
    if n_samples < 100:
        raise InvalidParameterError("orthogonality check needs at least 100 samples", n_samples=n_samples)
    workers = get_settings().workers if workers is None else workers
    logger.info(f"Orthogonality check: d={d}, samples={n_samples}, seed={seed}, workers={workers}")

    # Shards are fixed-size chunks so the summation order never depends on the worker count
    ranges = shard_ranges(n_samples, math.ceil(n_samples / CHUNK))
    sums = run_ordered(lambda start, stop: _moment_sums(seed, start, stop, d), ranges, workers)
    first = sum(s[0] for s in sums) / n_samples
    second = sum(s[1] for s in sums) / n_samples

    generators = d * d - 1
    first_dev = np.abs(first)
    second_dev = np.abs(second - np.eye(generators * generators) / generators)
    return OrthogonalityReport(
        dim=d,
        n_samples=n_samples,
        seed=seed,
        first_moment_max=float(first_dev.max()),
        second_moment_max=float(second_dev.max()),
        first_moment_rms=float(np.sqrt(np.mean(first_dev**2))),
        second_moment_rms=float(np.sqrt(np.mean(second_dev**2))),
        standard_error_scale=1.0 / math.sqrt(n_samples),
    )
