import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List

import numpy as np

from fidelium.config import get_settings
from fidelium.core.channels import (
    compose,
    dephasing,
    depolarizing,
    identity_channel,
    random_channel,
    unitary_channel,
)
from fidelium.core.designs import octahedron_d2, verify_design
from fidelium.core.fidelity import (
    avg_fidelity_design,
    avg_fidelity_entanglement,
    avg_fidelity_generators,
    avg_fidelity_pauli,
    avg_fidelity_povm_form,
    avg_fidelity_unitary_basis,
    gate_fidelity,
    mc_convergence,
    mc_haar_fidelity,
)
from fidelium.core.haar import SampleStream, mc_orthogonality_check, sample_unitary
from fidelium.services.design_service import EXACT_DESIGNS, get_design_service

logger = logging.getLogger(__name__)


class SelftestSuite(str, Enum):
    ORTHOGONALITY = "orthogonality"
    DESIGNS = "designs"
    ESTIMATORS = "estimators"
    ALL = "all"


class SelftestStep(str, Enum):
    PENDING = "pending"
    ORTHOGONALITY = "orthogonality"
    DESIGNS = "designs"
    ESTIMATORS = "estimators"
    MONTE_CARLO = "monte_carlo"
    COMPLETED = "completed"


@dataclass
class Check:
    name: str
    residual: float
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(self.residual < self.threshold)

    def to_dict(self) -> dict:
        return {"name": self.name, "residual": self.residual, "threshold": self.threshold, "passed": self.passed}


@dataclass
class SelftestRun:
    suite: SelftestSuite
    dim: int
    seed: int
    step: SelftestStep = SelftestStep.PENDING
    progress: int = 0  # 0-100
    checks: List[Check] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite.value,
            "dim": self.dim,
            "seed": self.seed,
            "passed": self.passed,
            "checks": [check.to_dict() for check in self.checks],
            **self.details,
        }


class SelftestService:
    def __init__(self):
        settings = get_settings()
        self.default_seed = settings.seed
        self.default_samples = settings.mc_samples

    def run(
        self,
        suite: SelftestSuite | str,
        dim: int,
        seed: int | None = None,
        samples: int | None = None,
        channels: int = 10,
        workers: int | None = None,
    ) -> SelftestRun:
        suite = SelftestSuite(suite)
        run = SelftestRun(suite=suite, dim=dim, seed=self.default_seed if seed is None else seed)
        samples = samples or self.default_samples
        logger.info(f"Starting selftest {suite.value}: d={dim}, seed={run.seed}")

        phases: list[tuple[SelftestStep, int, Callable[[], None]]] = []
        if suite in (SelftestSuite.ORTHOGONALITY, SelftestSuite.ALL):
            phases.append((SelftestStep.ORTHOGONALITY, 25, lambda: self._orthogonality(run, samples, workers)))
        if suite in (SelftestSuite.DESIGNS, SelftestSuite.ALL):
            phases.append((SelftestStep.DESIGNS, 50, lambda: self._designs(run, workers)))
        if suite in (SelftestSuite.ESTIMATORS, SelftestSuite.ALL):
            phases.append((SelftestStep.ESTIMATORS, 75, lambda: self._estimators(run, channels, workers)))
            phases.append((SelftestStep.MONTE_CARLO, 95, lambda: self._monte_carlo(run, samples, workers)))

        for step, progress, phase in phases:
            self._update_run(run, step, progress, "running")
            phase()
        self._update_run(run, SelftestStep.COMPLETED, 100, "passed" if run.passed else "FAILED")
        return run

    def _orthogonality(self, run: SelftestRun, samples: int, workers: int | None):
        report = mc_orthogonality_check(run.dim, samples, run.seed, workers)
        run.details["orthogonality"] = report.to_dict()
        run.checks.append(Check("orthogonality.first_moment", report.first_moment_max, report.threshold))
        run.checks.append(Check("orthogonality.second_moment", report.second_moment_max, report.threshold))

    def _designs(self, run: SelftestRun, workers: int | None):
        design = get_design_service().minimal_design(run.dim, seed=run.seed, workers=workers)
        exact = run.dim in EXACT_DESIGNS
        threshold = 1e-12 if exact else get_settings().search_tol
        for name, residual in verify_design(design).residuals().items():
            limit = 1e-10 if name == "povm_completeness" else threshold
            run.checks.append(Check(f"design.{design.source}.{name}", residual, limit))
        if run.dim == 2:
            octahedron = verify_design(octahedron_d2())
            for name in ("first_moment", "second_moment"):
                run.checks.append(Check(f"design.octahedron_d2.{name}", octahedron.residuals()[name], 1e-14))

    def _estimators(self, run: SelftestRun, count: int, workers: int | None):
        d = run.dim
        design = get_design_service().minimal_design(d, seed=run.seed, workers=workers)

        worst = {"design": 0.0, "povm": 0.0, "entanglement": 0.0, "unitary_basis": 0.0, "pauli": 0.0}
        for index in range(count):
            for k in sorted({1, d, d * d}):
                channel = random_channel(d, k, run.seed + index)
                reference = avg_fidelity_generators(channel).value
                design_value = avg_fidelity_design(channel, design).value
                worst["design"] = max(worst["design"], abs(reference - design_value))
                worst["povm"] = max(worst["povm"], abs(design_value - avg_fidelity_povm_form(channel, design).value))
                worst["entanglement"] = max(worst["entanglement"], abs(reference - avg_fidelity_entanglement(channel).value))
                worst["unitary_basis"] = max(worst["unitary_basis"], abs(reference - avg_fidelity_unitary_basis(channel).value))
                if d == 2:
                    worst["pauli"] = max(worst["pauli"], abs(reference - avg_fidelity_pauli(channel).value))
        run.checks.append(Check("estimators.generators_vs_design", worst["design"], 1e-10))
        run.checks.append(Check("estimators.design_vs_povm", worst["povm"], 1e-14))
        run.checks.append(Check("estimators.generators_vs_entanglement", worst["entanglement"], 1e-10))
        run.checks.append(Check("estimators.generators_vs_unitary_basis", worst["unitary_basis"], 1e-10))
        if d == 2:
            run.checks.append(Check("estimators.generators_vs_pauli", worst["pauli"], 1e-14))

        closed_form = 0.0
        for p in (0.0, 0.25, 0.5, 1.0):
            value = avg_fidelity_generators(depolarizing(d, p)).value
            closed_form = max(closed_form, abs(value - (1 - p * (d - 1) / d)))
        run.checks.append(Check("closed_form.depolarizing", closed_form, 1e-12))
        if d == 2:
            value = avg_fidelity_generators(dephasing(2, 0.5)).value
            run.checks.append(Check("closed_form.dephasing", abs(value - 2.0 / 3.0), 1e-12))

        gate_error = 0.0
        for index in range(count):
            v = sample_unitary(SampleStream(run.seed, index, d))
            gate_error = max(gate_error, abs(1.0 - gate_fidelity(unitary_channel(v), v, "generators").value))
            noisy = compose(depolarizing(d, 0.3), unitary_channel(v))
            expected = 1 - 0.3 * (d - 1) / d
            gate_error = max(gate_error, abs(expected - gate_fidelity(noisy, v, "generators").value))
        run.checks.append(Check("gate.reduction", gate_error, 1e-12))
        if d == 2:
            sigma_x = np.array([[0, 1], [1, 0]], dtype=np.complex128)
            value = gate_fidelity(identity_channel(2), sigma_x, "generators").value
            run.checks.append(Check("gate.identity_vs_sigma_x", abs(value - 1.0 / 3.0), 1e-12))

    def _monte_carlo(self, run: SelftestRun, samples: int, workers: int | None):
        worst = 0.0
        for index in range(3):
            channel = random_channel(run.dim, run.dim, run.seed + index)
            reference = avg_fidelity_generators(channel).value
            report = mc_haar_fidelity(channel, samples, run.seed + index, workers)
            worst = max(worst, abs(report.value - reference) / report.std_error)
        run.checks.append(Check("monte_carlo.standard_errors", worst, 5.0))

        # convergence: RMS error against the generator value over two decades of sample counts
        if samples < 10_000:
            run.details["monte_carlo_slope"] = None
            return
        channel = random_channel(run.dim, run.dim, run.seed)
        report = mc_convergence(channel, [samples // 100, samples // 10, samples], run.seed, workers=workers)
        run.details["monte_carlo_slope"] = report.slope
        run.details["monte_carlo_convergence"] = report.to_dict()
        run.checks.append(Check("monte_carlo.convergence_slope", abs(report.slope + 0.5), 0.15))

    def _update_run(self, run: SelftestRun, step: SelftestStep, progress: int, message: str):
        run.step = step
        run.progress = progress
        logger.info(f"Selftest {run.suite.value}: [{progress}%] {step.value} - {message}")


_selftest_service: SelftestService | None = None


def get_selftest_service() -> SelftestService:
    global _selftest_service
    if _selftest_service is None:
        _selftest_service = SelftestService()
    return _selftest_service
