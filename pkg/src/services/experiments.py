"""
Sweep Runner Service.

Batch engine behind the CLI: runs one independent simulation per grid point
on a bounded thread pool and assembles the rows, in grid order, into a
SweepTable ready for export.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import (
    Callable,
    Dict,
    List,
    NamedTuple,
    Optional,
    Sequence,
    Set,
    Tuple,
)

import numpy as np

from src import __version__
from src.exceptions import KpoError
from src.models.dynamics import GateKind
from src.models.params import KpoParams
from src.models.state import PhaseSpaceGrid, StateVector, WignerMap
from src.models.sweep import Cell, ExperimentKind, SweepConfig, SweepTable
from src.services.fock import fock_state, parity_expectation, wigner
from src.services.gates import (
    apply_rx,
    apply_rz,
    apply_zz,
    embed_qubit_state,
    extract_theta,
    initialize_qubit,
    project_to_qubit,
    qubit_basis,
)
from src.services.hamiltonian import instantaneous_spectrum

logger = logging.getLogger(__name__)

SPECTRUM_LEVELS = 4

COLUMNS: Dict[ExperimentKind, Tuple[str, ...]] = {
    ExperimentKind.RZ_SWEEP: (
        "phi",
        "fidelity",
        "leakage",
        "truncation",
        "norm_drift",
        "status",
    ),
    ExperimentKind.RX_SWEEP: (
        "delta0",
        "theta",
        "fidelity",
        "leakage",
        "truncation",
        "norm_drift",
        "status",
    ),
    ExperimentKind.ZZ_SWEEP: (
        "Theta",
        "fidelity",
        "leakage",
        "truncation",
        "norm_drift",
        "status",
    ),
    ExperimentKind.INIT_CHECK: (
        "init_time",
        "fidelity",
        "parity",
        "truncation",
        "norm_drift",
        "status",
    ),
    ExperimentKind.SPECTRUM_SWEEP: (
        ("pump",)
        + tuple(f"even_{i}" for i in range(SPECTRUM_LEVELS))
        + tuple(f"odd_{i}" for i in range(SPECTRUM_LEVELS))
        + ("even_gap", "status")
    ),
}

# Fields that do not change the numbers in a table stay out of its header
_UNRECORDED_FIELDS = {"workers", "output", "wigner_output"}
_WIGNER_FIELDS = {"wigner_extent", "wigner_resolution"}

# Fields an experiment never reads
_UNUSED_FIELDS: Dict[ExperimentKind, Set[str]] = {
    ExperimentKind.RZ_SWEEP: _WIGNER_FIELDS,
    ExperimentKind.RX_SWEEP: _WIGNER_FIELDS,
    ExperimentKind.ZZ_SWEEP: _WIGNER_FIELDS,
    ExperimentKind.INIT_CHECK: {"gate_time"},
    ExperimentKind.SPECTRUM_SWEEP: {"pump", "gate_time", "step", "sample_every"}
    | _WIGNER_FIELDS,
}

# Row status when the phase-ratio and fidelity-search angles disagree
THETA_MISMATCH = "theta_mismatch"

# Statuses of rows that carry numbers
COMPLETED = ("ok", THETA_MISMATCH)

CONVENTIONS: Dict[str, str] = {
    "units": "hbar = K = 1",
    "integrator": "rk4 fixed step, step shrunk to T/ceil(T/step)",
    "qubit_basis": "|0>=(C+ + C-)/sqrt2, |1>=(C+ - C-)/sqrt2, alpha0=sqrt(p0/K)",
    "theta_branch": "(-2pi, 0], theta = arg(c-/c+)_out - arg(c-/c+)_in",
    "rx_fidelity": "full Fock space against R_x(theta) embedded via the cat basis",
    "theta_check": "fidelity search within 1e-4 rad, else status theta_mismatch",
    "leakage": "1 - |P_qubit psi|^2",
    "truncation": "max sampled population of the top two Fock levels",
    "wigner": "W(beta) = (2/pi) <D(beta) P D(beta)^dag>, integral 1, vacuum peak 2/pi",
}


class RowOutcome(NamedTuple):
    row: Tuple[Cell, ...]
    state: Optional[StateVector] = None


def standard_input(kind: GateKind, params: KpoParams) -> StateVector:
    """Input state each sweep applies its gate to."""
    basis = qubit_basis(params)
    root = 1.0 / math.sqrt(2.0)
    if kind is GateKind.INIT:
        return fock_state(0, params.n_max)
    if kind is GateKind.RZ:
        return embed_qubit_state([root, root], basis)
    if kind is GateKind.RX:
        return embed_qubit_state([root, 1j * root], basis)
    return embed_qubit_state([0.5, 0.5, 0.5, 0.5], (basis, basis))


class SweepRunner:
    """Runs the sweep described by one SweepConfig."""

    def __init__(self, config: SweepConfig) -> None:
        self.config = config
        self.params = config.kpo_params()

    def run(self) -> SweepTable:
        handlers: Dict[ExperimentKind, Callable[[], SweepTable]] = {
            ExperimentKind.RZ_SWEEP: self.run_rz_sweep,
            ExperimentKind.RX_SWEEP: self.run_rx_sweep,
            ExperimentKind.ZZ_SWEEP: self.run_zz_sweep,
            ExperimentKind.INIT_CHECK: self.run_init_check,
            ExperimentKind.SPECTRUM_SWEEP: self.run_spectrum_sweep,
        }
        return handlers[self.config.experiment]()

    def _metadata(self) -> Dict[str, str]:
        metadata: Dict[str, str] = {"version": __version__}
        skipped = _UNRECORDED_FIELDS | _UNUSED_FIELDS[self.config.experiment]
        if self.config.wigner_output is None:
            skipped = skipped | _WIGNER_FIELDS
        for name in type(self.config).model_fields:
            if name in skipped:
                continue
            value = getattr(self.config, name)
            if value is None:
                continue
            if isinstance(value, tuple):
                metadata[name] = ",".join(repr(float(v)) for v in value)
            elif hasattr(value, "value"):
                metadata[name] = str(value.value)
            else:
                metadata[name] = repr(value) if isinstance(value, float) else str(value)
        metadata["kerr"] = repr(self.params.kerr)
        if self.config.experiment is not ExperimentKind.SPECTRUM_SWEEP:
            metadata["alpha0"] = repr(self.params.alpha0)
        metadata.update(CONVENTIONS)
        return metadata

    def _process(
        self, task: Callable[[float], RowOutcome], width: int
    ) -> List[RowOutcome]:
        """Run `task` on every grid value; failed rows become NaN with a status."""
        grid = self.config.grid()

        def guarded(value: float) -> RowOutcome:
            try:
                return task(value)
            except KpoError as e:
                logger.warning(
                    "%s row %.6g failed: %s", self.config.experiment.value, value, e
                )
                padding = (math.nan,) * (width - 2)
                return RowOutcome((value,) + padding + (type(e).__name__,))

        logger.info(
            "Starting %s over %d grid points with %d worker(s)...",
            self.config.experiment.value,
            len(grid),
            self.config.workers,
        )
        with ThreadPoolExecutor(max_workers=self.config.workers) as executor:
            outcomes = list(executor.map(guarded, grid))

        failed = sum(1 for outcome in outcomes if outcome.row[-1] not in COMPLETED)
        logger.info(
            "%s completed. Rows: %d, Failed: %d",
            self.config.experiment.value,
            len(outcomes),
            failed,
        )
        return outcomes

    def _table(
        self,
        outcomes: Sequence[RowOutcome],
        wigner_map: Optional[WignerMap] = None,
    ) -> SweepTable:
        return SweepTable(
            experiment=self.config.experiment,
            columns=COLUMNS[self.config.experiment],
            rows=[outcome.row for outcome in outcomes],
            metadata=self._metadata(),
            wigner=wigner_map,
        )

    def run_rz_sweep(self) -> SweepTable:
        cfg = self.config
        psi_in = standard_input(GateKind.RZ, self.params)
        basis = qubit_basis(self.params)

        def task(phi: float) -> RowOutcome:
            result = apply_rz(
                phi, cfg.gate_time, self.params, psi_in, cfg.step, cfg.sample_every
            )
            leakage = project_to_qubit(result.final_state, basis).leakage
            return RowOutcome(
                (
                    phi,
                    result.fidelity,
                    leakage,
                    result.leakage,
                    result.norm_drift,
                    "ok",
                )
            )

        return self._table(self._process(task, len(COLUMNS[cfg.experiment])))

    def run_rx_sweep(self) -> SweepTable:
        cfg = self.config
        psi_in = standard_input(GateKind.RX, self.params)
        basis = qubit_basis(self.params)

        def task(delta0: float) -> RowOutcome:
            result = apply_rx(
                delta0, cfg.gate_time, self.params, psi_in, cfg.step, cfg.sample_every
            )
            estimate = extract_theta(result.final_state, psi_in, basis)
            leakage = project_to_qubit(result.final_state, basis).leakage
            status = "ok" if estimate.agrees else THETA_MISMATCH
            return RowOutcome(
                (
                    delta0,
                    estimate.theta,
                    estimate.fidelity,
                    leakage,
                    result.leakage,
                    result.norm_drift,
                    status,
                )
            )

        return self._table(self._process(task, len(COLUMNS[cfg.experiment])))

    def run_zz_sweep(self) -> SweepTable:
        cfg = self.config
        pair = (self.params, self.params)
        psi_in = standard_input(GateKind.ZZ, self.params)
        basis = qubit_basis(self.params)

        def task(Theta: float) -> RowOutcome:
            result = apply_zz(
                Theta, cfg.gate_time, pair, psi_in, cfg.step, cfg.sample_every
            )
            leakage = project_to_qubit(result.final_state, (basis, basis)).leakage
            return RowOutcome(
                (
                    Theta,
                    result.fidelity,
                    leakage,
                    result.leakage,
                    result.norm_drift,
                    "ok",
                )
            )

        return self._table(self._process(task, len(COLUMNS[cfg.experiment])))

    def run_init_check(self) -> SweepTable:
        cfg = self.config

        def task(init_time: float) -> RowOutcome:
            result = initialize_qubit(
                self.params, init_time, step=cfg.step, sample_every=cfg.sample_every
            )
            parity = parity_expectation(result.final_state)
            return RowOutcome(
                (
                    init_time,
                    result.fidelity,
                    parity,
                    result.leakage,
                    result.norm_drift,
                    "ok",
                ),
                result.final_state,
            )

        outcomes = self._process(task, len(COLUMNS[cfg.experiment]))

        wigner_map = None
        if cfg.wigner_output is not None:
            finished = [
                (float(o.row[0]), o.state) for o in outcomes if o.state is not None
            ]
            if not finished:
                logger.warning("No initialization run finished; skipping Wigner map.")
            else:
                _, final_state = max(finished, key=lambda item: item[0])
                grid = PhaseSpaceGrid.square(cfg.wigner_extent, cfg.wigner_resolution)
                wigner_map = wigner(final_state, grid)
        return self._table(outcomes, wigner_map)

    def run_spectrum_sweep(self) -> SweepTable:
        cfg = self.config

        def task(pump: float) -> RowOutcome:
            spectrum = instantaneous_spectrum(
                self.params.with_pump(pump), levels=SPECTRUM_LEVELS
            )
            even = _pad(spectrum.even, SPECTRUM_LEVELS)
            odd = _pad(spectrum.odd, SPECTRUM_LEVELS)
            return RowOutcome((pump,) + even + odd + (spectrum.even_gap, "ok"))

        return self._table(self._process(task, len(COLUMNS[cfg.experiment])))


def _pad(values: Sequence[float], count: int) -> Tuple[float, ...]:
    padded = list(values)[:count]
    return tuple(padded + [math.nan] * (count - len(padded)))


def run_rz_sweep(cfg: SweepConfig) -> SweepTable:
    return SweepRunner(cfg).run_rz_sweep()


def run_rx_sweep(cfg: SweepConfig) -> SweepTable:
    return SweepRunner(cfg).run_rx_sweep()


def run_zz_sweep(cfg: SweepConfig) -> SweepTable:
    return SweepRunner(cfg).run_zz_sweep()


def run_init_check(cfg: SweepConfig) -> SweepTable:
    return SweepRunner(cfg).run_init_check()


def run_spectrum_sweep(cfg: SweepConfig) -> SweepTable:
    return SweepRunner(cfg).run_spectrum_sweep()


def fidelity_floor(table: SweepTable) -> float:
    """Lowest fidelity over the rows that completed."""
    pairs = zip(table.column("fidelity"), table.column("status"))
    values = [float(v) for v, status in pairs if status in COMPLETED]
    return float(np.min(values)) if values else math.nan
