import logging

from fidelium.commands.base import Command, RunConfig
from fidelium.errors import DesignVerificationError
from fidelium.schemas import DesignFile
from fidelium.services.design_service import DesignMethod, get_design_service

logger = logging.getLogger(__name__)


def register(subparsers):
    parser = subparsers.add_parser("design", help="generate or verify isotropic state designs")
    actions = parser.add_subparsers(dest="action", required=True)

    gen = actions.add_parser("gen", help="build a design")
    gen.add_argument("--dim", type=int, required=True)
    gen.add_argument("--method", choices=[m.value for m in DesignMethod], default=DesignMethod.EXACT.value)
    gen.add_argument("--seed", type=int)
    gen.add_argument("--tol", type=float, help="maximum overlap deviation accepted by the search")
    gen.add_argument("--workers", type=int)
    gen.add_argument("-o", "--output", dest="output_path")
    gen.set_defaults(command=Command.DESIGN_GEN)

    verify = actions.add_parser("verify", help="report the isotropy residuals of a design file")
    verify.add_argument("input_path", metavar="file")
    verify.add_argument("--design-tol", type=float, help="residual threshold for a passing design")
    verify.set_defaults(command=Command.DESIGN_VERIFY)


def handle_design_gen(config: RunConfig) -> dict | DesignFile:
    service = get_design_service()
    design = service.generate(
        config.dim,
        config.method,
        seed=config.seed,
        tol=config.tolerances["search"],
        workers=config.workers,
    )
    document = DesignFile.from_design(design)
    if config.output_path is None:
        return document
    service.save_design(design, config.output_path)
    logger.info(f"Wrote {len(design)}-state design to {config.output_path}")
    return {
        "written": config.output_path,
        "dim": design.dim,
        "size": len(design),
        "source": design.source,
        "verification": service.verify(design, config.tolerances["design"]),
    }


def handle_design_verify(config: RunConfig) -> dict:
    service = get_design_service()
    design = service.load_design(config.input_path)
    report = service.verify(design, config.tolerances["design"])
    if not report["passed"]:
        name = max(report["violations"], key=report["violations"].get)
        raise DesignVerificationError(f"design fails verification: {name}", residual=name, report=report)
    return report
