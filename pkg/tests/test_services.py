import numpy as np
import pytest
from pydantic import ValidationError

from fidelium.config import Settings, get_settings
from fidelium.core.fidelity import FidelityMethod
from fidelium.errors import (
    DimensionMismatchError,
    InvalidParameterError,
    NotUnitaryError,
    UsageError,
)
from fidelium.schemas import GateFile, encode_matrix, write_model
from fidelium.services.channel_service import ChannelKind, get_channel_service
from fidelium.services.design_service import DesignMethod, get_design_service
from fidelium.services.fidelity_service import get_fidelity_service, resolve_method
from fidelium.services.selftest_service import Check, SelftestSuite, get_selftest_service

from helpers import SX


def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv("FIDELIUM_SEED", "5")
    monkeypatch.setenv("FIDELIUM_TP_TOL", "1e-6")
    get_settings.cache_clear()
    settings = get_settings()
    assert settings.seed == 5
    assert settings.tolerances()["tp"] == 1e-6
    assert get_channel_service().default_seed == 5


def test_settings_reject_bad_tolerances(monkeypatch):
    monkeypatch.setenv("FIDELIUM_DESIGN_TOL", "-1")
    with pytest.raises(ValidationError):
        Settings()


def test_channel_generation():
    service = get_channel_service()
    assert service.generate(ChannelKind.DEPOLARIZING, 3, p=0.3).rank == 9
    assert service.generate("dephasing", 2).rank == 2
    assert service.generate("unitary-random", 4, seed=1).rank == 1
    assert service.generate("kraus-random", 3, k=4, seed=1).rank == 4
    with pytest.raises(UsageError):
        service.generate("depolarizing", 3)
    with pytest.raises(UsageError):
        service.generate("depolarizing", 3, p=1.5)
    with pytest.raises(UsageError):
        service.generate("kraus-random", 3, k=0)
    with pytest.raises(UsageError):
        service.generate("kraus-random", 1)


def test_channel_files_are_lossless(tmp_path):
    service = get_channel_service()
    channel = service.generate("kraus-random", 3, k=2, seed=8)
    path = service.save_channel(channel, tmp_path / "channel.json")
    np.testing.assert_array_equal(service.load_channel(path).kraus_ops, channel.kraus_ops)


def test_gate_loading(tmp_path):
    service = get_channel_service()
    good = write_model(tmp_path / "gate.json", GateFile(dim=2, matrix=encode_matrix(SX)))
    np.testing.assert_array_equal(service.load_gate(good, dim=2), SX)
    with pytest.raises(DimensionMismatchError):
        service.load_gate(good, dim=3)
    bad = write_model(tmp_path / "bad.json", GateFile(dim=2, matrix=encode_matrix(np.diag([1, 2]))))
    with pytest.raises(NotUnitaryError):
        service.load_gate(bad)


def test_design_generation():
    service = get_design_service()
    assert service.generate(2).source == "tetrahedron_d2"
    assert service.generate(3, DesignMethod.EXACT).source == "nonuple_d3"
    assert service.generate(2, "octahedron").source == "octahedron_d2"
    assert service.minimal_design(4, seed=0).source.startswith("search(")
    with pytest.raises(InvalidParameterError):
        service.generate(4, "exact")
    with pytest.raises(InvalidParameterError):
        service.generate(3, "octahedron")


def test_design_round_trip_and_verify(tmp_path):
    service = get_design_service()
    path = service.save_design(service.generate(3), tmp_path / "d3.json")
    design = service.load_design(path)
    assert design.source == str(path)
    report = service.verify(design)
    assert report["passed"] and not report["violations"]
    assert max(report["residuals"].values()) < 1e-12


def test_method_aliases():
    assert resolve_method("mc") is FidelityMethod.MC_HAAR
    assert resolve_method("unitary-basis") is FidelityMethod.UNITARY_BASIS
    assert resolve_method("povm") is FidelityMethod.POVM
    with pytest.raises(ValueError):
        resolve_method("bogus")


def test_fidelity_service_defaults_to_minimal_design():
    channel = get_channel_service().generate("depolarizing", 3, p=0.3)
    report = get_fidelity_service().run(channel, "design")
    assert report.value == pytest.approx(0.8, abs=1e-12)
    assert report.metadata["design_source"] == "nonuple_d3"
    mc = get_fidelity_service().run(channel, "mc", n_samples=500, seed=2)
    assert mc.n_samples == 500 and mc.std_error is not None


def test_fidelity_service_with_gate():
    channel = get_channel_service().generate("unitary-random", 2, seed=3)
    gate = channel.kraus_ops[0]
    assert get_fidelity_service().run(channel, "povm", gate=gate).value == pytest.approx(1.0, abs=1e-12)


def test_selftest_designs_suite():
    run = get_selftest_service().run(SelftestSuite.DESIGNS, 3, seed=0)
    assert run.passed
    assert run.step.value == "completed" and run.progress == 100
    assert all(check["name"].startswith("design.") for check in run.to_dict()["checks"])


def test_selftest_estimators_suite_small():
    run = get_selftest_service().run("estimators", 2, seed=1, samples=1_000, channels=2)
    assert run.passed, [c.to_dict() for c in run.checks if not c.passed]
    assert run.details["monte_carlo_slope"] is None
    names = {check.name for check in run.checks}
    assert {"closed_form.dephasing", "gate.identity_vs_sigma_x", "estimators.generators_vs_pauli"} <= names


def test_check_threshold_is_strict():
    assert Check("x", 0.1, 0.2).passed
    assert not Check("x", 0.2, 0.2).passed
