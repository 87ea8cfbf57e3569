"""
Single-run tools: Wigner maps of named states and protocol trajectories.
"""

import logging
import math
from pathlib import Path
from typing import Dict, Optional, Type

import click

from src import __version__
from src.commands.sweeps import handle_errors
from src.config import Config
from src.models.dynamics import GateKind
from src.models.params import KpoParams
from src.models.state import PhaseSpaceGrid, StateVector
from src.services.experiments import CONVENTIONS, standard_input
from src.services.exporter import SweepExporter
from src.services.fock import CatParity, cat_state, coherent_state, fock_state
from src.services.fock import wigner as wigner_map
from src.services.gates import (
    build_protocol,
    initialize_qubit,
    qubit_basis,
    run_protocol,
)

logger = logging.getLogger(__name__)

STATE_CHOICES = ["vacuum", "coherent", "even-cat", "odd-cat", "zero", "one", "init"]

# Gate times used when --gate-time is not given
DEFAULT_GATE_TIMES: Dict[GateKind, float] = {
    GateKind.INIT: 100.0,
    GateKind.RZ: 2.0,
    GateKind.RX: 10.0,
    GateKind.ZZ: 2.0,
}


def build_named_state(
    name: str,
    params: KpoParams,
    alpha: Optional[float] = None,
    init_time: float = 100.0,
    step: float = Config.STEP,
) -> StateVector:
    """Resolve a --state choice into a single-oscillator state."""
    amplitude = params.alpha0 if alpha is None else alpha
    if name == "vacuum":
        return fock_state(0, params.n_max)
    if name == "coherent":
        return coherent_state(amplitude, params.n_max)
    if name == "even-cat":
        return cat_state(amplitude, CatParity.EVEN, params.n_max)
    if name == "odd-cat":
        return cat_state(amplitude, CatParity.ODD, params.n_max)
    if name == "zero":
        return qubit_basis(params).zero
    if name == "one":
        return qubit_basis(params).one
    return initialize_qubit(params, init_time, step=step).final_state


@click.command(name="wigner")
@click.option(
    "--state", "state_name", type=click.Choice(STATE_CHOICES), default="even-cat"
)
@click.option("--alpha", type=float, help="Amplitude; defaults to sqrt(p/K).")
@click.option("--pump", type=float, default=4.0, show_default=True)
@click.option("--nmax", type=click.IntRange(min=1))
@click.option("--step", type=float, help="RK4 step for --state init.")
@click.option("--init-time", type=float, default=100.0, show_default=True)
@click.option("--extent", type=float, default=6.0, show_default=True)
@click.option(
    "--resolution", type=click.IntRange(min=2), default=121, show_default=True
)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path))
@click.pass_obj
@handle_errors
def wigner(
    app_config: Type[Config],
    state_name: str,
    alpha: Optional[float],
    pump: float,
    nmax: Optional[int],
    step: Optional[float],
    init_time: float,
    extent: float,
    resolution: int,
    out: Optional[Path],
) -> None:
    """Wigner function of a cat, coherent, qubit or freshly initialized state."""
    params = KpoParams(pump=pump, n_max=nmax or app_config.N_MAX)
    psi = build_named_state(
        state_name, params, alpha, init_time, step or app_config.STEP
    )
    result = wigner_map(psi, PhaseSpaceGrid.square(extent, resolution))

    metadata = {
        "version": __version__,
        "state": state_name,
        "alpha": repr(params.alpha0 if alpha is None else alpha),
        "pump": repr(pump),
        "n_max": str(params.n_max),
        "wigner": CONVENTIONS["wigner"],
        "integral": f"{result.integral():.9g}",
    }
    if state_name == "init":
        metadata["init_time"] = repr(init_time)

    target = out or app_config.OUTPUT_DIR / f"wigner_{state_name}.csv"
    SweepExporter.write(SweepExporter.wigner_csv(result, metadata), target)
    click.echo(f"Wrote {resolution}x{resolution} Wigner map to {target}")


@click.command(name="trace")
@click.option(
    "--gate",
    type=click.Choice([kind.value for kind in GateKind]),
    default=GateKind.RZ.value,
    show_default=True,
)
@click.option("--angle", type=float, default=math.pi / 2, help="phi, Delta0 or Theta.")
@click.option("--gate-time", type=float, help="Gate or ramp time in 1/K.")
@click.option("--pump", type=float, default=4.0, show_default=True)
@click.option("--nmax", type=click.IntRange(min=1))
@click.option("--step", type=float)
@click.option(
    "--sample-every", type=click.IntRange(min=1), default=100, show_default=True
)
@click.option("--levels", type=click.IntRange(min=1), default=5, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path))
@click.pass_obj
@handle_errors
def trace(
    app_config: Type[Config],
    gate: str,
    angle: float,
    gate_time: Optional[float],
    pump: float,
    nmax: Optional[int],
    step: Optional[float],
    sample_every: int,
    levels: int,
    out: Optional[Path],
) -> None:
    """Run one protocol from its sweep input state and dump the trajectory."""
    kind = GateKind(gate)
    params = KpoParams(pump=pump, n_max=nmax or app_config.N_MAX)
    duration = gate_time or DEFAULT_GATE_TIMES[kind]
    chain = (params, params) if kind is GateKind.ZZ else params
    protocol = build_protocol(kind, angle, duration, chain)

    result = run_protocol(
        protocol,
        standard_input(kind, params),
        step=step or app_config.STEP,
        sample_every=sample_every,
        keep_states=True,
    )

    metadata = {
        "version": __version__,
        "gate": kind.value,
        "angle": repr(angle),
        "gate_time": repr(duration),
        "pump": repr(pump),
        "n_max": str(params.n_max),
        "steps": str(result.steps),
        "norm_drift": f"{result.norm_drift:.9g}",
    }
    target = out or app_config.OUTPUT_DIR / f"trace_{kind.value}.csv"
    content = SweepExporter.trajectory_csv(result, levels, metadata)
    SweepExporter.write(content, target)
    click.echo(f"Wrote {len(result.times)} samples to {target}")


TOOL_COMMANDS = [wigner, trace]
