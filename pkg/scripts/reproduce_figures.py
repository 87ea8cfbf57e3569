"""
Figure Reproduction Tool.

Runs every sweep at its published defaults and writes the CSVs (plus gnuplot
scripts and the initialization Wigner map) into one export directory, then
prints a short report of the fidelity floors.
"""

import logging
import math
import sys
from pathlib import Path
from typing import Dict, List, Optional

import click

ROOT_DIR = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT_DIR))

from src.exceptions import KpoError  # noqa: E402
from src.models.sweep import ExperimentKind, SweepConfig, SweepTable  # noqa: E402
from src.services.experiments import SweepRunner, fidelity_floor  # noqa: E402
from src.services.exporter import SweepExporter  # noqa: E402
from src.services.validator import SweepValidator  # noqa: E402

# Initialize logging for the standalone script
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s - %(levelname)s - %(message)s"
)
logger = logging.getLogger(__name__)


class FigureReproducer:
    """
    Builds the default sweep matrix and exports every table it produces.
    """

    # Sweeps behind the published figures, in the order they are run
    EXPERIMENTS: List[ExperimentKind] = [
        ExperimentKind.INIT_CHECK,
        ExperimentKind.RZ_SWEEP,
        ExperimentKind.RX_SWEEP,
        ExperimentKind.ZZ_SWEEP,
        ExperimentKind.SPECTRUM_SWEEP,
    ]

    def __init__(self, export_dir: Path, workers: int = 1) -> None:
        self.export_dir = export_dir
        self.workers = workers
        self.failed_sweeps: List[str] = []
        self.floors: Dict[str, float] = {}

    def build_configs(self, step: Optional[float] = None) -> List[SweepConfig]:
        configs: List[SweepConfig] = []
        for experiment in self.EXPERIMENTS:
            output = self.export_dir / f"{experiment.value}.csv"
            wigner_output = None
            if experiment is ExperimentKind.INIT_CHECK:
                wigner_output = self.export_dir / "wigner_init.csv"
            configs.append(
                SweepConfig.defaults_for(
                    experiment,
                    workers=self.workers,
                    step=step,
                    output=output,
                    wigner_output=wigner_output,
                )
            )
        logger.info("Generated sweep matrix: %d sweeps.", len(configs))
        return configs

    def export(self, config: SweepConfig, table: SweepTable) -> None:
        out = Path(config.output or self.export_dir / f"{config.experiment.value}.csv")
        SweepExporter.write(SweepExporter.table_csv(table), out)
        SweepExporter.write(
            SweepExporter.gnuplot_script(table, out.name), out.with_suffix(".gp")
        )
        # Keep the config next to its table so the run can be repeated
        SweepExporter.write(config.to_text(), out.with_suffix(".cfg"))
        if table.wigner is not None and config.wigner_output:
            SweepExporter.write(
                SweepExporter.wigner_csv(table.wigner, table.metadata),
                config.wigner_output,
            )

    def execute(self, step: Optional[float] = None) -> None:
        """Validate -> run -> export, one sweep after the other."""
        configs = self.build_configs(step)
        for index, config in enumerate(configs, start=1):
            name = config.experiment.value
            logger.info(">>> Processing sweep %d/%d: %s", index, len(configs), name)
            try:
                SweepValidator.enforce(config)
                table = SweepRunner(config).run()
                self.export(config, table)
            except (KpoError, OSError) as e:
                logger.error("Sweep %s failed: %s", name, e)
                self.failed_sweeps.append(name)
                continue
            if "fidelity" in table.columns:
                self.floors[name] = fidelity_floor(table)

        print("\n" + "=" * 30 + "\nREPRODUCTION REPORT\n" + "=" * 30)
        for name, floor in self.floors.items():
            shown = "n/a" if math.isnan(floor) else f"{floor:.6f}"
            print(f"{name:<16}min F = {shown}")
        print(f"Failed sweeps:  {len(self.failed_sweeps)}")
        print("=" * 30)


@click.command()
@click.option(
    "--out-dir", type=click.Path(path_type=Path), default=ROOT_DIR / "exports"
)
@click.option("--workers", type=click.IntRange(min=1), default=1)
@click.option("--step", type=float, default=None)
def main(out_dir: Path, workers: int, step: Optional[float]) -> None:
    """Run every sweep at its published defaults."""
    try:
        FigureReproducer(out_dir, workers=workers).execute(step)
    except Exception as exc:
        logger.error("Initialization error: %s", exc)


if __name__ == "__main__":
    main()
