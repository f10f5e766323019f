from fidelium.commands.base import Command, RunConfig
from fidelium.errors import SelftestFailure
from fidelium.services.selftest_service import SelftestSuite, get_selftest_service


def register(subparsers):
    parser = subparsers.add_parser("selftest", help="run the bundled acceptance checks")
    parser.add_argument("suite", choices=[s.value for s in SelftestSuite])
    parser.add_argument("--dim", type=int, required=True)
    parser.add_argument("--samples", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--channels", type=int, help="random channels per estimator comparison")
    parser.add_argument("--workers", type=int)
    parser.set_defaults(command=Command.SELFTEST)


def handle_selftest(config: RunConfig) -> dict:
    run = get_selftest_service().run(
        config.suite,
        config.dim,
        seed=config.seed,
        samples=config.samples,
        channels=config.channels,
        workers=config.workers,
    )
    report = run.to_dict()
    if not run.passed:
        failed = [check["name"] for check in report["checks"] if not check["passed"]]
        raise SelftestFailure(f"{len(failed)} selftest checks failed", failed=failed, report=report)
    return report
