import argparse
import logging
import sys
from typing import Any, Callable

from pydantic import BaseModel, ValidationError

from fidelium.commands import basis, channel, design, fidelity, selftest
from fidelium.commands.base import Command, RunConfig
from fidelium.config import Settings, get_settings
from fidelium.errors import FideliumError, UsageError
from fidelium.schemas import dumps

logger = logging.getLogger(__name__)

HANDLERS: dict[Command, Callable[[RunConfig], BaseModel | dict]] = {
    Command.BASIS: basis.handle_basis,
    Command.DESIGN_GEN: design.handle_design_gen,
    Command.DESIGN_VERIFY: design.handle_design_verify,
    Command.CHANNEL_GEN: channel.handle_channel_gen,
    Command.FIDELITY: fidelity.handle_fidelity,
    Command.SELFTEST: selftest.handle_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fidelium",
        description="Average gate fidelity of qudit channels from generators, designs and Haar sampling.",
    )
    subparsers = parser.add_subparsers(dest="group", required=True)
    for module in (basis, design, channel, fidelity, selftest):
        module.register(subparsers)
    return parser


def configure_logging(level: str):
    # Thread name keeps worker-pool lines apart; everything goes to stderr
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - [%(threadName)s] %(message)s",
        stream=sys.stderr,
    )


def run(config: RunConfig) -> tuple[int, Any]:
    """Execute one command; returns (exit status, JSON-ready document)."""
    try:
        return 0, HANDLERS[config.command](config)
    except FideliumError as e:
        logger.error(f"{config.command.value} failed: [{e.code}] {e.message}")
        return e.exit_code, e.to_dict()


def load_settings() -> Settings:
    try:
        return get_settings()
    except ValidationError as e:
        raise UsageError.from_validation("invalid FIDELIUM_* environment", e) from e


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = load_settings()
    except UsageError as e:
        configure_logging("WARNING")
        logger.error(f"settings rejected: {e.context['problems']}")
        status, document = e.exit_code, e.to_dict()
    else:
        configure_logging(settings.log_level)
        logger.info(f"Fidelium {settings.app_version[:7] if settings.app_version != 'dev' else 'dev'}")
        try:
            config = RunConfig.from_args(args)
        except FideliumError as e:
            status, document = e.exit_code, e.to_dict()
        else:
            status, document = run(config)

    sys.stdout.write(dumps(document))
    sys.stdout.flush()
    return status
