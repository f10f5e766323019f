from fidelium.commands.base import Command, RunConfig
from fidelium.config import get_settings
from fidelium.core.fidelity import FidelityReport
from fidelium.services.channel_service import get_channel_service
from fidelium.services.design_service import get_design_service
from fidelium.services.fidelity_service import get_fidelity_service

METHODS = ["generators", "design", "povm", "mc", "entanglement", "unitary-basis", "pauli"]


def register(subparsers):
    parser = subparsers.add_parser("fidelity", help="estimate the average gate fidelity of a channel")
    parser.add_argument("--channel", dest="channel_path", required=True)
    parser.add_argument("--gate", dest="gate_path", help="ideal gate U; defaults to the identity")
    parser.add_argument("--method", choices=METHODS, required=True)
    parser.add_argument("--design", dest="design_path", help="design file for the design/povm methods")
    parser.add_argument("--samples", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--tp-tol", type=float, help="trace-preservation tolerance for the channel file")
    parser.add_argument("--design-tol", type=float, help="verification threshold for the design")
    parser.set_defaults(command=Command.FIDELITY)


def handle_fidelity(config: RunConfig) -> FidelityReport:
    channels = get_channel_service()
    channel = channels.load_channel(config.channel_path, tp_tol=config.tolerances["tp"])
    gate = channels.load_gate(config.gate_path, channel.dim) if config.gate_path else None
    design = get_design_service().load_design(config.design_path) if config.design_path else None

    report = get_fidelity_service().run(
        channel,
        config.method,
        gate=gate,
        design=design,
        n_samples=config.samples,
        seed=config.seed,
        workers=config.workers,
        verify_tol=config.tolerances["design"],
    )
    report.metadata["channel"] = config.channel_path
    if config.gate_path:
        report.metadata["gate_file"] = config.gate_path
    report.metadata["version"] = get_settings().app_version
    return report
