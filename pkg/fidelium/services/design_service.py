import logging
from enum import Enum
from pathlib import Path

from fidelium.config import get_settings
from fidelium.core.designs import (
    DesignVerification,
    StateDesign,
    nonuple_d3,
    octahedron_d2,
    simplex_search,
    tetrahedron_d2,
    verify_design,
)
from fidelium.errors import InvalidParameterError
from fidelium.schemas import DesignFile, read_model, write_model

logger = logging.getLogger(__name__)


class DesignMethod(str, Enum):
    EXACT = "exact"
    OCTAHEDRON = "octahedron"
    SEARCH = "search"


EXACT_DESIGNS = {2: tetrahedron_d2, 3: nonuple_d3}


class DesignService:
    def __init__(self):
        settings = get_settings()
        self.default_seed = settings.seed
        self.search_tol = settings.search_tol
        self.verify_tol = settings.design_tol

    def generate(
        self,
        dim: int,
        method: DesignMethod | str = DesignMethod.EXACT,
        seed: int | None = None,
        tol: float | None = None,
        workers: int | None = None,
    ) -> StateDesign:
        method = DesignMethod(method)
        if method is DesignMethod.EXACT:
            if dim not in EXACT_DESIGNS:
                raise InvalidParameterError(
                    f"no exact construction for d={dim}; use the search method", dim=dim, available=sorted(EXACT_DESIGNS)
                )
            return EXACT_DESIGNS[dim]()
        if method is DesignMethod.OCTAHEDRON:
            if dim != 2:
                raise InvalidParameterError("the octahedron design exists for d=2 only", dim=dim)
            return octahedron_d2()
        seed = self.default_seed if seed is None else seed
        return simplex_search(dim, seed, tol or self.search_tol, workers=workers)

    def minimal_design(self, dim: int, seed: int | None = None, workers: int | None = None) -> StateDesign:
        """The exact d^2-state design when one is known, otherwise a searched one."""
        method = DesignMethod.EXACT if dim in EXACT_DESIGNS else DesignMethod.SEARCH
        return self.generate(dim, method, seed=seed, workers=workers)

    def load_design(self, path: str | Path) -> StateDesign:
        design = read_model(path, DesignFile).to_design(source=str(path))
        logger.info(f"Loaded design {path}: d={design.dim}, {len(design)} states")
        return design

    def save_design(self, design: StateDesign, path: str | Path) -> Path:
        return write_model(path, DesignFile.from_design(design))

    def verify(self, design: StateDesign, tol: float | None = None) -> dict:
        tol = tol or self.verify_tol
        report: DesignVerification = verify_design(design)
        result = report.to_dict()
        result.update({"source": design.source, "tol": tol, "passed": report.passes(tol), "violations": report.violations(tol)})
        return result


_design_service: DesignService | None = None


def get_design_service() -> DesignService:
    global _design_service
    if _design_service is None:
        _design_service = DesignService()
    return _design_service
