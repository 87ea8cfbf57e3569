"""
Unit tests for the SweepValidator service.
"""

import pytest

from src.exceptions import ConfigError
from src.models.sweep import ExperimentKind, SweepConfig
from src.services.validator import SweepValidator


def test_defaults_are_in_range() -> None:
    for experiment in ExperimentKind:
        config = SweepConfig.defaults_for(experiment)
        assert SweepValidator.find_issues(config) == []


def test_grid_outside_tested_range() -> None:
    config = SweepConfig.defaults_for(ExperimentKind.RX_SWEEP, grid_stop=4.0)
    issues = SweepValidator.find_issues(config)
    assert len(issues) == 1
    assert "rx_sweep grid" in issues[0]


def test_gate_time_only_checked_for_gates() -> None:
    gate = SweepConfig.defaults_for(ExperimentKind.RZ_SWEEP, gate_time=50.0)
    assert any("gate_time" in issue for issue in SweepValidator.find_issues(gate))

    init = SweepConfig.defaults_for(ExperimentKind.INIT_CHECK, gate_time=50.0)
    assert SweepValidator.find_issues(init) == []


def test_truncation_adequacy() -> None:
    config = SweepConfig.defaults_for(ExperimentKind.RZ_SWEEP, n_max=10)
    issues = SweepValidator.find_issues(config)
    assert any("n_max=10" in issue for issue in issues)

    # The spectrum sweep is sized by its largest pump
    spectrum = SweepConfig.defaults_for(
        ExperimentKind.SPECTRUM_SWEEP, grid_stop=8.0, n_max=20
    )
    assert any("n_max" in issue for issue in SweepValidator.find_issues(spectrum))


def test_pump_and_step_limits() -> None:
    config = SweepConfig.defaults_for(
        ExperimentKind.ZZ_SWEEP, pump=0.5, step=0.05
    )
    issues = SweepValidator.find_issues(config)
    assert any(issue.startswith("pump") for issue in issues)
    assert any(issue.startswith("step") for issue in issues)


def test_warn_policy_returns_issues(caplog) -> None:
    config = SweepConfig.defaults_for(ExperimentKind.RZ_SWEEP, grid_stop=5.0)
    issues = SweepValidator.enforce(config, "warn")
    assert len(issues) == 1
    assert "Validation:" in caplog.text


def test_error_policy_raises() -> None:
    config = SweepConfig.defaults_for(
        ExperimentKind.RZ_SWEEP, grid_stop=5.0, range_policy="error"
    )
    with pytest.raises(ConfigError, match="tested range"):
        SweepValidator.enforce(config)

    in_range = SweepConfig.defaults_for(ExperimentKind.RZ_SWEEP)
    assert SweepValidator.enforce(in_range, "error") == []


def test_unknown_policy_is_rejected() -> None:
    config = SweepConfig.defaults_for(ExperimentKind.RZ_SWEEP)
    with pytest.raises(ConfigError, match="Unknown range policy"):
        SweepValidator.enforce(config, "ignore")
