from fidelium.commands.base import Command, RunConfig
from fidelium.core.su_basis import gell_mann_basis
from fidelium.schemas import BasisDocument


def register(subparsers):
    parser = subparsers.add_parser("basis", help="dump the generalized Gell-Mann generators as JSON")
    parser.add_argument("--dim", type=int, required=True)
    parser.set_defaults(command=Command.BASIS)


def handle_basis(config: RunConfig) -> BasisDocument:
    return BasisDocument.from_basis(gell_mann_basis(config.dim))
