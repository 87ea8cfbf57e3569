"""
Tests for the sweep runner: row assembly, metadata, failure rows and the
full-grid acceptance runs (marked slow).
"""

import math

import numpy as np
import pytest

from src import __version__
from src.models.dynamics import GateKind
from src.models.params import KpoParams
from src.models.sweep import ExperimentKind, SweepConfig
from src.services import gates
from src.services.experiments import (
    COLUMNS,
    THETA_MISMATCH,
    SweepRunner,
    fidelity_floor,
    run_init_check,
    run_rx_sweep,
    run_rz_sweep,
    run_spectrum_sweep,
    run_zz_sweep,
    standard_input,
)
from src.services.exporter import SweepExporter
from src.services.fock import parity_expectation


def _config(experiment: ExperimentKind, **overrides) -> SweepConfig:
    return SweepConfig.defaults_for(experiment, **overrides)


def _theta_distance(theta: float, target: float) -> float:
    return abs((theta - target + math.pi) % (2 * math.pi) - math.pi)


def test_standard_inputs_are_normalized(params: KpoParams) -> None:
    for kind in GateKind:
        psi = standard_input(kind, params)
        assert psi.norm() == pytest.approx(1.0, abs=1e-12)
    assert standard_input(GateKind.ZZ, params).dims == (21, 21)
    assert parity_expectation(standard_input(GateKind.RZ, params)) == pytest.approx(
        1.0, abs=1e-12
    )


def test_small_rz_sweep() -> None:
    table = run_rz_sweep(
        _config(ExperimentKind.RZ_SWEEP, grid_start=-1.0, grid_stop=1.0, grid_count=3)
    )

    assert table.columns == COLUMNS[ExperimentKind.RZ_SWEEP]
    assert table.column("phi") == [-1.0, 0.0, 1.0]
    assert table.column("status") == ["ok", "ok", "ok"]
    assert fidelity_floor(table) >= 0.98
    assert all(float(v) < 0.02 for v in table.column("leakage"))

    assert table.metadata["version"] == __version__
    assert table.metadata["experiment"] == "rz_sweep"
    assert "theta_branch" in table.metadata
    assert "workers" not in table.metadata
    assert table.metadata["alpha0"] == repr(2.0)


def test_results_do_not_depend_on_worker_count() -> None:
    base = _config(
        ExperimentKind.RZ_SWEEP, grid_start=-2.0, grid_stop=2.0, grid_count=4
    )
    serial = SweepRunner(base.with_overrides(workers=1)).run()
    threaded = SweepRunner(base.with_overrides(workers=2)).run()

    assert SweepExporter.table_csv(serial) == SweepExporter.table_csv(threaded)


def test_rerun_is_byte_identical() -> None:
    config = _config(ExperimentKind.RZ_SWEEP, grid_values=(-0.5, 0.5))
    first = SweepExporter.table_csv(run_rz_sweep(config))
    second = SweepExporter.table_csv(run_rz_sweep(config))
    assert first == second


def test_metadata_records_only_fields_the_sweep_reads() -> None:
    rz = SweepRunner(_config(ExperimentKind.RZ_SWEEP))._metadata()
    assert rz["gate_time"] == "2.0"
    assert "wigner_resolution" not in rz

    init = SweepRunner(
        _config(ExperimentKind.INIT_CHECK, wigner_output="w.csv")
    )._metadata()
    assert "gate_time" not in init
    assert init["wigner_resolution"] == "121"

    spectrum = SweepRunner(_config(ExperimentKind.SPECTRUM_SWEEP))._metadata()
    for name in ("pump", "gate_time", "step", "alpha0"):
        assert name not in spectrum
    assert spectrum["n_max"] == "20"


def test_rx_sweep_endpoints() -> None:
    table = run_rx_sweep(
        _config(ExperimentKind.RX_SWEEP, grid_values=(0.0, 2.5))
    )
    theta = [float(v) for v in table.column("theta")]

    assert _theta_distance(theta[0], 0.0) < 1e-4
    assert _theta_distance(theta[1], -math.pi) <= 0.15
    assert -2 * math.pi < theta[1] <= 0.0
    assert fidelity_floor(table) >= 0.98


def test_small_zz_sweep() -> None:
    table = run_zz_sweep(_config(ExperimentKind.ZZ_SWEEP, grid_values=(0.0, 1.5)))

    assert table.column("status") == ["ok", "ok"]
    assert fidelity_floor(table) >= 0.98
    assert all(float(v) < 0.02 for v in table.column("leakage"))


def test_init_check_with_wigner_map() -> None:
    table = run_init_check(
        _config(
            ExperimentKind.INIT_CHECK,
            grid_values=(5.0, 10.0),
            wigner_output="init_wigner.csv",
            wigner_resolution=61,
        )
    )

    fidelities = [float(v) for v in table.column("fidelity")]
    assert all(0.0 < f <= 1.0 + 1e-12 for f in fidelities)
    assert all(abs(float(p) - 1.0) < 1e-8 for p in table.column("parity"))

    assert table.wigner is not None
    assert table.wigner.values.shape == (61, 61)
    assert table.wigner.integral() == pytest.approx(1.0, abs=1e-3)


def test_init_check_without_wigner_output() -> None:
    table = run_init_check(_config(ExperimentKind.INIT_CHECK, grid_values=(5.0, 6.0)))
    assert table.wigner is None


def test_spectrum_sweep_rows() -> None:
    table = run_spectrum_sweep(
        _config(
            ExperimentKind.SPECTRUM_SWEEP, grid_start=0.0, grid_stop=4.0, grid_count=2
        )
    )
    bare, pumped = table.rows

    # Bare Kerr oscillator: (K/2) n (n - 1)
    assert bare[1:5] == pytest.approx((0.0, 1.0, 6.0, 15.0), abs=1e-10)
    assert pumped[1] == pytest.approx(-8.0, abs=1e-4)
    assert pumped[5] == pytest.approx(pumped[1], abs=1e-4)
    assert table.column("status") == ["ok", "ok"]


def test_spectrum_sweep_keeps_oscillator_parameters() -> None:
    config = _config(ExperimentKind.SPECTRUM_SWEEP, grid_values=(0.0, 1.0), n_max=16)
    runner = SweepRunner(config)
    runner.params = KpoParams(kerr=2.0, n_max=16)
    bare = runner.run_spectrum_sweep().rows[0]

    # (K/2) n (n - 1) at K = 2
    assert bare[1:5] == pytest.approx((0.0, 2.0, 12.0, 30.0), abs=1e-10)


def test_rx_row_flags_angle_disagreement(monkeypatch) -> None:
    search = gates.search_theta
    monkeypatch.setattr(gates, "search_theta", lambda *args: search(*args) + 0.5)
    table = run_rx_sweep(
        _config(ExperimentKind.RX_SWEEP, grid_values=(0.0, 0.5), gate_time=2.0)
    )

    assert table.column("status") == [THETA_MISMATCH, THETA_MISMATCH]
    assert all(math.isfinite(float(v)) for v in table.column("theta"))
    assert math.isfinite(fidelity_floor(table))


def test_failed_row_is_reported_not_raised(caplog) -> None:
    config = _config(ExperimentKind.RZ_SWEEP, grid_values=(0.0, 1.0), step=0.05)
    table = SweepRunner(config).run()

    assert table.column("status") == [
        "IntegrationDivergedError",
        "IntegrationDivergedError",
    ]
    assert math.isnan(float(table.column("fidelity")[0]))
    assert math.isnan(fidelity_floor(table))
    assert "failed" in caplog.text


@pytest.mark.slow
def test_rz_acceptance_grid() -> None:
    table = run_rz_sweep(_config(ExperimentKind.RZ_SWEEP, workers=4))
    assert len(table.rows) == 41
    assert fidelity_floor(table) >= 0.98

    identity = table.rows[20]
    assert identity[0] == pytest.approx(0.0, abs=1e-12)
    assert float(identity[1]) >= 1 - 1e-8


@pytest.mark.slow
def test_rx_acceptance_grid() -> None:
    table = run_rx_sweep(_config(ExperimentKind.RX_SWEEP, workers=4))
    theta = np.array([float(v) for v in table.column("theta")])

    assert len(theta) == 26
    assert _theta_distance(theta[0], 0.0) < 1e-4
    assert _theta_distance(theta[-1], -math.pi) <= 0.15
    assert np.all(np.diff(theta) <= 1e-9)
    assert fidelity_floor(table) >= 0.98


@pytest.mark.slow
def test_zz_acceptance_grid_and_longer_gate() -> None:
    short = run_zz_sweep(_config(ExperimentKind.ZZ_SWEEP, workers=4))
    long = run_zz_sweep(_config(ExperimentKind.ZZ_SWEEP, workers=4, gate_time=4.0))

    assert fidelity_floor(short) >= 0.98
    for fast, slow in zip(short.column("fidelity"), long.column("fidelity")):
        assert float(slow) >= float(fast) - 1e-6


@pytest.mark.slow
def test_init_acceptance_grid() -> None:
    table = run_init_check(_config(ExperimentKind.INIT_CHECK, workers=4))
    fidelities = [float(v) for v in table.column("fidelity")]

    assert table.column("init_time") == [5.0, 10.0, 20.0, 50.0, 100.0]
    assert fidelities[-1] >= 0.999
    assert all(b >= a for a, b in zip(fidelities, fidelities[1:]))
    assert all(abs(float(p) - 1.0) < 1e-8 for p in table.column("parity"))
