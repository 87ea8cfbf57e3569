"""
CSV Exporter Service.

Turns sweep tables, Wigner maps and trajectories into CSV strings using
in-memory buffers, and writes them to disk. Every CSV starts with a block of
`# key=value` header lines; numbers carry 9 significant digits.
"""

import csv
import io
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from src.models.dynamics import SimResult
from src.models.state import WignerMap
from src.models.sweep import Cell, SweepTable
from src.services.fock import parity_expectation, truncation_leakage

logger = logging.getLogger(__name__)


class SweepExporter:
    """Service to handle simulator data exports."""

    @staticmethod
    def format_value(value: Union[Cell, int, complex, None]) -> str:
        """9 significant digits; -0 becomes 0, NaN becomes nan."""
        if value is None:
            return ""
        if isinstance(value, str):
            return value
        if isinstance(value, (int, np.integer)):
            return str(int(value))
        number = float(np.real(value))
        if math.isnan(number):
            return "nan"
        text = f"{number:.9g}"
        return "0" if text == "-0" else text

    @staticmethod
    def _header(output: io.StringIO, metadata: Optional[Dict[str, str]]) -> None:
        for key, value in (metadata or {}).items():
            output.write(f"# {key}={value}\n")

    @classmethod
    def _writer(cls, output: io.StringIO) -> Any:
        return csv.writer(output, lineterminator="\n")

    @classmethod
    def _rows(cls, rows: Iterable[Sequence[Cell]]) -> List[List[str]]:
        return [[cls.format_value(cell) for cell in row] for row in rows]

    @classmethod
    def table_csv(cls, table: SweepTable) -> str:
        """
        Format a sweep table: header block, column row, one row per grid point.

        Args:
            table: The assembled sweep results.

        Returns:
            str: The CSV content as a formatted string.
        """
        logger.debug(
            "Generating CSV for %s (%d rows).", table.experiment.value, len(table.rows)
        )
        if not table.rows:
            logger.warning("Sweep table %s has no rows.", table.experiment.value)

        output = io.StringIO()
        cls._header(output, {"experiment": table.experiment.value, **table.metadata})
        writer = cls._writer(output)
        writer.writerow(table.columns)
        writer.writerows(cls._rows(table.rows))
        return output.getvalue()

    @classmethod
    def wigner_csv(
        cls, wigner_map: WignerMap, metadata: Optional[Dict[str, str]] = None
    ) -> str:
        """First row: x values; first column: p values; body: W(x + i p)."""
        output = io.StringIO()
        cls._header(output, metadata)
        writer = cls._writer(output)
        writer.writerow(["p\\x"] + [cls.format_value(x) for x in wigner_map.grid.xvec])
        for p, row in zip(wigner_map.grid.pvec, wigner_map.values):
            writer.writerow([cls.format_value(p)] + [cls.format_value(w) for w in row])
        return output.getvalue()

    @classmethod
    def trajectory_csv(
        cls,
        result: SimResult,
        fock_levels: int = 5,
        metadata: Optional[Dict[str, str]] = None,
    ) -> str:
        """
        One row per stored sample: t, norm, parity, leakage and the lowest
        `fock_levels` Fock populations of each oscillator.
        """
        if not result.samples:
            raise ValueError("Trajectory export needs a result with stored samples.")

        dims = result.samples[0][1].dims
        levels = [min(fock_levels, d) for d in dims]
        if len(dims) == 1:
            population_columns = [f"p{n}" for n in range(levels[0])]
        else:
            population_columns = [
                f"p{which + 1}_{n}"
                for which in range(len(dims))
                for n in range(levels[which])
            ]

        output = io.StringIO()
        cls._header(output, metadata)
        writer = cls._writer(output)
        writer.writerow(["t", "norm", "parity", "leakage"] + population_columns)

        for t, state in result.samples:
            populations = state.populations().reshape(state.dims)
            marginals: List[float] = []
            for axis, count in enumerate(levels):
                other = tuple(i for i in range(len(dims)) if i != axis)
                marginal = populations.sum(axis=other) if other else populations
                marginals.extend(float(v) for v in marginal[:count])
            row = [
                t,
                state.norm(),
                parity_expectation(state),
                truncation_leakage(state),
            ]
            writer.writerow(cls._rows([row + marginals])[0])
        return output.getvalue()

    @staticmethod
    def gnuplot_script(table: SweepTable, csv_name: str) -> str:
        """A gnuplot script plotting every numeric column against the first."""
        x_label = table.columns[0]
        series = [
            f"'{csv_name}' using 1:{index + 1} with linespoints title '{name}'"
            for index, name in enumerate(table.columns)
            if 0 < index and name != "status"
        ]
        lines = [
            f"# {table.experiment.value}",
            "set datafile separator ','",
            "set datafile commentschars '#'",
            "set key autotitle columnhead",
            f"set xlabel '{x_label}'",
            "set grid",
            "plot " + ", \\\n     ".join(series),
        ]
        return "\n".join(lines) + "\n"

    @staticmethod
    def write(content: str, path: Union[str, Path]) -> Path:
        file_path = Path(path)
        file_path.parent.mkdir(parents=True, exist_ok=True)
        file_path.write_text(content, encoding="utf-8")
        logger.info("SUCCESS: Export saved to: %s", file_path)
        return file_path
