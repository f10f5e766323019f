import json

import pytest

from fidelium.config import get_settings
from fidelium.main import main
from fidelium.services import channel_service, design_service, fidelity_service, selftest_service


@pytest.fixture(autouse=True)
def fresh_settings():
    """Settings and service singletons are rebuilt for every test."""
    get_settings.cache_clear()
    channel_service._channel_service = None
    design_service._design_service = None
    fidelity_service._fidelity_service = None
    selftest_service._selftest_service = None
    yield
    get_settings.cache_clear()


@pytest.fixture
def cli(capsys):
    """Run the CLI in-process; returns (exit status, parsed JSON, raw stdout)."""

    def invoke(*argv):
        status = main([str(arg) for arg in argv])
        out = capsys.readouterr().out
        return status, json.loads(out), out

    return invoke
