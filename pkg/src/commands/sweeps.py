"""
Sweep commands (Controller) for the KPO simulator.

Each command resolves a SweepConfig (built-in defaults or a config file,
then command-line overrides), checks it against the tested ranges, runs it
and writes the resulting CSV.
"""

import functools
import logging
from pathlib import Path
from typing import Any, Callable, List, Optional, Type, TypeVar

import click
from pydantic import ValidationError

from src.config import Config
from src.exceptions import ConfigError, KpoError
from src.models.sweep import ExperimentKind, SweepConfig, SweepTable
from src.services.experiments import COMPLETED, SweepRunner
from src.services.exporter import SweepExporter
from src.services.validator import SweepValidator

logger = logging.getLogger(__name__)

F = TypeVar("F", bound=Callable[..., Any])


def handle_errors(func: F) -> F:
    """Turn simulator and I/O failures into a clean exit with a diagnostic."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except KpoError as e:
            logger.error("%s failed: %s", func.__name__, e)
            raise click.ClickException(f"{type(e).__name__}: {e}") from e
        except ValidationError as e:
            logger.error("%s got invalid parameters: %s", func.__name__, e)
            raise click.ClickException(f"Invalid parameters: {e}") from e
        except OSError as e:
            logger.error("%s failed on I/O: %s", func.__name__, e)
            raise click.ClickException(f"I/O error: {e}") from e

    return wrapper  # type: ignore[return-value]


def sweep_options(func: F) -> F:
    """Options shared by every sweep command."""
    options = [
        click.option(
            "--config",
            "config_path",
            type=click.Path(dir_okay=False, path_type=Path),
            help="Flat key=value sweep configuration file.",
        ),
        click.option(
            "--out",
            type=click.Path(dir_okay=False, path_type=Path),
            help="Output CSV path.",
        ),
        click.option("--workers", type=click.IntRange(min=1), help="Worker threads."),
        click.option("--step", type=float, help="RK4 time step in units of 1/K."),
        click.option("--nmax", type=click.IntRange(min=1), help="Fock truncation."),
        click.option("--gate-time", type=float, help="Gate or ramp time in 1/K."),
        click.option(
            "--policy",
            type=click.Choice(["warn", "error"]),
            help="What to do with configurations outside the tested ranges.",
        ),
        click.option(
            "--gnuplot",
            is_flag=True,
            default=False,
            help="Also write a gnuplot script next to the CSV.",
        ),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def resolve_config(
    app_config: Type[Config],
    experiment: ExperimentKind,
    config_path: Optional[Path],
    **overrides: Any,
) -> SweepConfig:
    """Command line beats config file, config file beats environment defaults."""
    if config_path is not None:
        config = SweepConfig.from_file(config_path)
        if config.experiment is not experiment:
            raise ConfigError(
                f"Config file describes '{config.experiment.value}', "
                f"not '{experiment.value}'."
            )
    else:
        config = SweepConfig.defaults_for(
            experiment,
            n_max=app_config.N_MAX,
            step=app_config.STEP,
            workers=app_config.WORKERS,
            range_policy=app_config.RANGE_POLICY,
        )
    return config.with_overrides(**overrides)


def run_and_export(
    app_config: Type[Config], config: SweepConfig, gnuplot: bool = False
) -> SweepTable:
    SweepValidator.enforce(config)
    table = SweepRunner(config).run()

    default_name = f"{config.experiment.value}.csv"
    out = Path(config.output) if config.output else app_config.OUTPUT_DIR / default_name
    SweepExporter.write(SweepExporter.table_csv(table), out)

    if gnuplot:
        script = SweepExporter.gnuplot_script(table, out.name)
        SweepExporter.write(script, out.with_suffix(".gp"))

    if table.wigner is not None and config.wigner_output:
        wigner_metadata = {"source": config.experiment.value, **table.metadata}
        SweepExporter.write(
            SweepExporter.wigner_csv(table.wigner, wigner_metadata),
            config.wigner_output,
        )

    failed = sum(1 for status in table.column("status") if status not in COMPLETED)
    click.echo(f"Wrote {len(table.rows)} rows ({failed} failed) to {out}")
    return table


def _sweep_command(
    name: str, experiment: ExperimentKind, summary: str
) -> click.Command:
    @click.command(name=name, help=summary)
    @sweep_options
    @click.pass_obj
    @handle_errors
    def command(
        app_config: Type[Config],
        config_path: Optional[Path],
        out: Optional[Path],
        workers: Optional[int],
        step: Optional[float],
        nmax: Optional[int],
        gate_time: Optional[float],
        policy: Optional[str],
        gnuplot: bool,
    ) -> None:
        config = resolve_config(
            app_config,
            experiment,
            config_path,
            output=out,
            workers=workers,
            step=step,
            n_max=nmax,
            gate_time=gate_time,
            range_policy=policy,
        )
        run_and_export(app_config, config, gnuplot)

    return command


@click.command(name="init-check")
@sweep_options
@click.option(
    "--wigner-out",
    type=click.Path(dir_okay=False, path_type=Path),
    help="Write the Wigner map of the longest initialization run here.",
)
@click.pass_obj
@handle_errors
def init_check(
    app_config: Type[Config],
    config_path: Optional[Path],
    out: Optional[Path],
    workers: Optional[int],
    step: Optional[float],
    nmax: Optional[int],
    gate_time: Optional[float],
    policy: Optional[str],
    gnuplot: bool,
    wigner_out: Optional[Path],
) -> None:
    """Adiabatic initialization fidelity against the even cat over T_init."""
    if gate_time is not None:
        logger.warning("--gate-time is ignored by init-check; use init_time values.")
    config = resolve_config(
        app_config,
        ExperimentKind.INIT_CHECK,
        config_path,
        output=out,
        workers=workers,
        step=step,
        n_max=nmax,
        range_policy=policy,
        wigner_output=wigner_out,
    )
    run_and_export(app_config, config, gnuplot)


rz_sweep = _sweep_command(
    "rz-sweep", ExperimentKind.RZ_SWEEP, "R_z(phi) fidelity over the phi grid."
)
rx_sweep = _sweep_command(
    "rx-sweep",
    ExperimentKind.RX_SWEEP,
    "R_x rotation angle and fidelity over the detuning amplitude grid.",
)
zz_sweep = _sweep_command(
    "zz-sweep", ExperimentKind.ZZ_SWEEP, "U(Theta) fidelity over the Theta grid."
)
spectrum = _sweep_command(
    "spectrum",
    ExperimentKind.SPECTRUM_SWEEP,
    "Lowest parity-resolved energies of the KPO over a pump grid.",
)

SWEEP_COMMANDS: List[click.Command] = [
    init_check,
    rz_sweep,
    rx_sweep,
    zz_sweep,
    spectrum,
]
