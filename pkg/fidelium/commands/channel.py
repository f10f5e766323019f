import logging

from fidelium.commands.base import Command, RunConfig
from fidelium.errors import UsageError
from fidelium.schemas import ChannelFile
from fidelium.services.channel_service import ChannelKind, get_channel_service

logger = logging.getLogger(__name__)


def register(subparsers):
    parser = subparsers.add_parser("channel", help="build standard and random channels")
    actions = parser.add_subparsers(dest="action", required=True)

    gen = actions.add_parser("gen", help="write a channel file")
    gen.add_argument("--kind", choices=[k.value for k in ChannelKind], required=True)
    gen.add_argument("--dim", type=int, required=True)
    gen.add_argument("--p", type=float, help="noise strength for depolarizing/dephasing")
    gen.add_argument("--k", type=int, help="number of Kraus operators for kraus-random")
    gen.add_argument("--seed", type=int)
    gen.add_argument("-o", "--output", dest="output_path")
    gen.set_defaults(command=Command.CHANNEL_GEN)


def handle_channel_gen(config: RunConfig) -> dict | ChannelFile:
    if config.dim is None:
        raise UsageError("channel gen needs --dim")
    service = get_channel_service()
    channel = service.generate(config.kind, config.dim, p=config.p, k=config.k, seed=config.seed)
    if config.output_path is None:
        return ChannelFile.from_channel(channel)
    service.save_channel(channel, config.output_path)
    logger.info(f"Wrote {config.kind} channel to {config.output_path}")
    return {
        "written": config.output_path,
        "kind": config.kind,
        "dim": channel.dim,
        "kraus_rank": channel.rank,
        "tp_residual": channel.tp_residual,
    }
