"""Average gate fidelity estimators.

Every estimator works on the gate-free form F(E) = F(E, 1); a gate U is
handled by precomposing E with U^dagger (see `gate_fidelity`).
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np
from pydantic import BaseModel, ValidationInfo, model_validator

from fidelium.config import get_settings
from fidelium.core.channels import KrausChannel, apply_extended, apply_operator, precompose_gate, weyl_operators
from fidelium.core.designs import StateDesign, povm_elements, require_verified
from fidelium.core.haar import sample_pure_states
from fidelium.core.su_basis import GeneratorBasis, gell_mann_basis
from fidelium.core.tensor_core import ComplexMatrix, DensityMatrix
from fidelium.errors import DimensionMismatchError, InvalidParameterError
from fidelium.workers import run_ordered, shard_ranges

logger = logging.getLogger(__name__)

# Samples per Monte Carlo shard; fixed so the shard layout never depends on the worker count
SHARD = 10_000

EXTERNAL_IDENTITY = "external identity"


class FidelityMethod(str, Enum):
    GENERATORS = "generators"
    DESIGN = "design"
    POVM = "povm"
    MC_HAAR = "mc_haar"
    ENTANGLEMENT = "entanglement"
    UNITARY_BASIS = "unitary_basis"
    PAULI = "pauli"


class FidelityReport(BaseModel):
    method: FidelityMethod
    value: float
    std_error: float | None = None
    n_samples: int | None = None
    metadata: dict[str, str] = {}

    @model_validator(mode="after")
    def _check(self, info: ValidationInfo) -> "FidelityReport":
        # channels loaded at a loose tolerance may overshoot by their trace-preservation defect
        slack = get_settings().derived_tol + (info.context or {}).get("tp_residual", 0.0)
        if not -slack <= self.value <= 1.0 + slack:
            raise ValueError(f"fidelity {self.value!r} outside [0, 1]")
        if (self.std_error is not None) != (self.method is FidelityMethod.MC_HAAR):
            raise ValueError("std_error is reported by the Monte Carlo estimator only")
        return self


def _report(method: FidelityMethod, value: float, channel: KrausChannel, **extra: Any) -> FidelityReport:
    std_error = extra.pop("std_error", None)
    n_samples = extra.pop("n_samples", None)
    metadata = {"dim": str(channel.dim), "kraus_rank": str(channel.rank)}
    metadata.update({key: str(item) for key, item in extra.items()})
    return FidelityReport.model_validate(
        {"method": method, "value": value, "std_error": std_error, "n_samples": n_samples, "metadata": metadata},
        context={"tp_residual": channel.tp_residual},
    )


def generator_sum(channel: KrausChannel, basis: GeneratorBasis) -> float:
    """sum_a tr[T_a E(T_a)]."""
    images = apply_operator(channel, basis.generators)
    return float(np.real(np.einsum("aij,aji->", basis.generators, images)))


def avg_fidelity_generators(channel: KrausChannel, basis: GeneratorBasis | None = None) -> FidelityReport:
    basis = gell_mann_basis(channel.dim) if basis is None else basis
    if basis.dim != channel.dim:
        raise DimensionMismatchError("channel and basis dimensions differ", channel_dim=channel.dim, basis_dim=basis.dim)
    d = channel.dim
    value = 1.0 / d + 2.0 / (d * (d + 1)) * generator_sum(channel, basis)
    return _report(FidelityMethod.GENERATORS, value, channel)


def avg_fidelity_pauli(channel: KrausChannel) -> FidelityReport:
    """Qubit form 1/2 + (1/3) sum_i tr[(sigma_i/2) E(sigma_i/2)]."""
    if channel.dim != 2:
        raise DimensionMismatchError("the Pauli form is defined for qubits only", dim=channel.dim)
    halves = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=np.complex128) / 2
    images = apply_operator(channel, halves)
    value = 0.5 + float(np.real(np.einsum("aij,aji->", halves, images))) / 3.0
    return _report(FidelityMethod.PAULI, value, channel)


def _design_sum(channel: KrausChannel, design: StateDesign) -> float:
    """sum_r c_r tr[rho_r E(rho_r)] = sum_r c_r sum_i |<psi_r|K_i|psi_r>|^2."""
    if design.dim != channel.dim:
        raise DimensionMismatchError("channel and design dimensions differ", channel_dim=channel.dim, design_dim=design.dim)
    amplitudes = np.einsum("ri,kij,rj->rk", design.states.conj(), channel.kraus_ops, design.states)
    return float(design.weights @ np.sum(np.abs(amplitudes) ** 2, axis=1))


def avg_fidelity_design(
    channel: KrausChannel, design: StateDesign, verify_tol: float | None = None
) -> FidelityReport:
    verification = require_verified(design, verify_tol)
    value = _design_sum(channel, design)
    return _report(
        FidelityMethod.DESIGN, value, channel,
        design_source=design.source, design_size=len(design), design_max_residual=verification.max_residual,
    )


def avg_fidelity_povm_form(
    channel: KrausChannel, design: StateDesign, verify_tol: float | None = None
) -> FidelityReport:
    """(1/d) sum_r tr[O_r E(rho_r)] with O_r = rho_r / d, for a verified minimal design."""
    if design.dim != channel.dim:
        raise DimensionMismatchError("channel and design dimensions differ", channel_dim=channel.dim, design_dim=design.dim)
    elements = povm_elements(design)
    verification = require_verified(design, verify_tol)
    images = apply_operator(channel, design.density_matrices())
    value = float(np.real(np.einsum("rij,rji->", elements, images))) / design.dim
    return _report(
        FidelityMethod.POVM, value, channel,
        design_source=design.source, design_size=len(design), design_max_residual=verification.max_residual,
    )


def _haar_integrand(channel: KrausChannel, seed: int, start: int, stop: int) -> np.ndarray:
    psi = sample_pure_states(seed, start, stop, channel.dim)
    amplitudes = np.einsum("ni,kij,nj->nk", psi.conj(), channel.kraus_ops, psi)
    return np.sum(np.abs(amplitudes) ** 2, axis=1)


def mc_haar_fidelity(
    channel: KrausChannel, n_samples: int, seed: int, workers: int | None = None
) -> FidelityReport:
    """Sample mean of tr[rho_psi E(rho_psi)] over Haar-random pure states."""
    if n_samples < 100:
        raise InvalidParameterError("Monte Carlo estimate needs at least 100 samples", n_samples=n_samples)
    workers = get_settings().workers if workers is None else workers
    ranges = shard_ranges(n_samples, math.ceil(n_samples / SHARD))
    logger.info(f"Monte Carlo fidelity: d={channel.dim}, samples={n_samples}, seed={seed}, shards={len(ranges)}")
    shards = run_ordered(lambda start, stop: _haar_integrand(channel, seed, start, stop), ranges, workers)
    values = np.concatenate(shards)
    std_error = float(np.std(values, ddof=1) / math.sqrt(n_samples))
    return _report(
        FidelityMethod.MC_HAAR, float(np.mean(values)), channel,
        std_error=std_error, n_samples=n_samples, seed=seed,
    )


@dataclass(frozen=True)
class ConvergenceReport:
    counts: list[int]
    rms_errors: list[float]
    repeats: int
    slope: float

    def to_dict(self) -> dict:
        return {"counts": self.counts, "rms_errors": self.rms_errors, "repeats": self.repeats, "slope": self.slope}


def mc_convergence(
    channel: KrausChannel,
    counts: list[int],
    seed: int,
    repeats: int = 32,
    workers: int | None = None,
) -> ConvergenceReport:
    """Log-log slope of the RMS Monte Carlo error against the generator value.

    Each (count, repeat) pair draws from its own seed so the runs at
    different counts are independent.
    """
    reference = avg_fidelity_generators(channel).value
    rms_errors = []
    for position, n in enumerate(counts):
        errors = [
            mc_haar_fidelity(channel, n, seed + position * repeats + j, workers).value - reference
            for j in range(repeats)
        ]
        rms_errors.append(float(np.sqrt(np.mean(np.square(errors)))))
    slope = float(np.polyfit(np.log(counts), np.log(rms_errors), 1)[0])
    logger.info(f"Monte Carlo convergence: d={channel.dim}, counts={counts}, slope={slope:.3f}")
    return ConvergenceReport(list(counts), rms_errors, repeats, slope)


def maximally_entangled(d: int) -> DensityMatrix:
    phi = np.eye(d, dtype=np.complex128).reshape(d * d) / math.sqrt(d)
    return DensityMatrix(np.outer(phi, phi.conj()))


def entanglement_fidelity(channel: KrausChannel) -> float:
    """<Phi|(E x id)(|Phi><Phi|)|Phi> with Phi = sum_j |jj> / sqrt(d)."""
    phi = maximally_entangled(channel.dim)
    image = apply_extended(channel, phi)
    return float(np.real(np.trace(phi.matrix @ image.matrix)))


def avg_fidelity_entanglement(channel: KrausChannel) -> FidelityReport:
    d = channel.dim
    f_e = entanglement_fidelity(channel)
    return _report(
        FidelityMethod.ENTANGLEMENT, (d * f_e + 1.0) / (d + 1.0), channel,
        entanglement_fidelity=repr(f_e), relation=EXTERNAL_IDENTITY,
    )


def avg_fidelity_unitary_basis(channel: KrausChannel) -> FidelityReport:
    """(sum_j tr[U_j E(U_j^dagger)] + d^2) / (d^2 (d + 1)) over the Weyl operators."""
    d = channel.dim
    unitaries = weyl_operators(d)
    images = apply_operator(channel, np.conj(np.swapaxes(unitaries, 1, 2)))
    total = float(np.real(np.einsum("jab,jba->", unitaries, images)))
    return _report(
        FidelityMethod.UNITARY_BASIS, (total + d * d) / (d * d * (d + 1)), channel, relation=EXTERNAL_IDENTITY
    )


def estimate(channel: KrausChannel, method: FidelityMethod | str, **params: Any) -> FidelityReport:
    """Run one estimator by name; `params` carries the method-specific arguments."""
    method = FidelityMethod(method)
    if method is FidelityMethod.GENERATORS:
        return avg_fidelity_generators(channel, params.get("basis"))
    if method is FidelityMethod.PAULI:
        return avg_fidelity_pauli(channel)
    if method is FidelityMethod.ENTANGLEMENT:
        return avg_fidelity_entanglement(channel)
    if method is FidelityMethod.UNITARY_BASIS:
        return avg_fidelity_unitary_basis(channel)
    if method in (FidelityMethod.DESIGN, FidelityMethod.POVM):
        design = params.get("design")
        if design is None:
            raise InvalidParameterError(f"method {method.value} needs a design")
        if method is FidelityMethod.DESIGN:
            return avg_fidelity_design(channel, design, params.get("verify_tol"))
        return avg_fidelity_povm_form(channel, design, params.get("verify_tol"))
    settings = get_settings()
    return mc_haar_fidelity(
        channel,
        params.get("n_samples") or settings.mc_samples,
        settings.seed if params.get("seed") is None else params["seed"],
        params.get("workers"),
    )


def gate_fidelity(
    channel: KrausChannel, u: ComplexMatrix, method: FidelityMethod | str, **params: Any
) -> FidelityReport:
    """F(E, U) evaluated as F(E') with E'(rho) = E(U^dagger rho U)."""
    report = estimate(precompose_gate(channel, u), method, **params)
    report.metadata["gate"] = "precomposed"
    return report
