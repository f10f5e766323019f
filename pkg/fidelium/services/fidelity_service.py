import logging

from fidelium.config import get_settings
from fidelium.core.channels import KrausChannel
from fidelium.core.designs import StateDesign
from fidelium.core.fidelity import FidelityMethod, FidelityReport, estimate, gate_fidelity
from fidelium.core.tensor_core import ComplexMatrix
from fidelium.services.design_service import get_design_service

logger = logging.getLogger(__name__)

# CLI spellings that differ from the estimator names
METHOD_ALIASES = {"mc": FidelityMethod.MC_HAAR, "unitary-basis": FidelityMethod.UNITARY_BASIS}


def resolve_method(name: str | FidelityMethod) -> FidelityMethod:
    if isinstance(name, FidelityMethod):
        return name
    return METHOD_ALIASES.get(name) or FidelityMethod(name)


class FidelityService:
    def __init__(self):
        settings = get_settings()
        self.default_seed = settings.seed
        self.default_samples = settings.mc_samples
        self.verify_tol = settings.design_tol

    def run(
        self,
        channel: KrausChannel,
        method: str | FidelityMethod,
        gate: ComplexMatrix | None = None,
        design: StateDesign | None = None,
        n_samples: int | None = None,
        seed: int | None = None,
        workers: int | None = None,
        verify_tol: float | None = None,
    ) -> FidelityReport:
        """Evaluate one estimator, filling in defaults and provenance."""
        method = resolve_method(method)
        seed = self.default_seed if seed is None else seed
        params = {"workers": workers}
        if method in (FidelityMethod.DESIGN, FidelityMethod.POVM):
            if design is None:
                design = get_design_service().minimal_design(channel.dim, seed=seed, workers=workers)
            params.update(design=design, verify_tol=verify_tol or self.verify_tol)
        elif method is FidelityMethod.MC_HAAR:
            params.update(n_samples=n_samples or self.default_samples, seed=seed)

        logger.info(f"Estimating fidelity: method={method.value}, d={channel.dim}, gate={'yes' if gate is not None else 'no'}")
        if gate is None:
            return estimate(channel, method, **params)
        return gate_fidelity(channel, gate, method, **params)


_fidelity_service: FidelityService | None = None


def get_fidelity_service() -> FidelityService:
    global _fidelity_service
    if _fidelity_service is None:
        _fidelity_service = FidelityService()
    return _fidelity_service
