"""
Sweep Validation Service.

Checks a SweepConfig against the parameter ranges the simulator has been
validated on, and applies the warn/error range policy.
"""

import logging
import math
from typing import Dict, List, Optional, Tuple

from src.exceptions import ConfigError
from src.models.sweep import ExperimentKind, SweepConfig

logger = logging.getLogger(__name__)


class SweepValidator:
    """
    Service to validate sweep configurations before running them.
    """

    # Grid ranges covered by the reference runs
    TESTED_GRIDS: Dict[ExperimentKind, Tuple[float, float]] = {
        ExperimentKind.RZ_SWEEP: (-math.pi, math.pi),
        ExperimentKind.RX_SWEEP: (0.0, 2.5),
        ExperimentKind.ZZ_SWEEP: (0.0, math.pi),
        ExperimentKind.INIT_CHECK: (5.0, 200.0),
        ExperimentKind.SPECTRUM_SWEEP: (0.0, 8.0),
    }

    TESTED_PUMP: Tuple[float, float] = (1.0, 8.0)
    TESTED_GATE_TIME: Tuple[float, float] = (1.0, 20.0)

    # RK4 stays stable at n_max=20 only well below this step
    MAX_STEP: float = 1e-2

    # Slack for grids built from rounded pi
    _EDGE: float = 1e-9

    @classmethod
    def find_issues(cls, config: SweepConfig) -> List[str]:
        """
        List every way the configuration leaves the tested envelope.

        Args:
            config: The sweep configuration to check.

        Returns:
            List[str]: Human-readable issues; empty when fully in range.
        """
        issues: List[str] = []
        grid = config.grid()
        low, high = cls.TESTED_GRIDS[config.experiment]
        if min(grid) < low - cls._EDGE or max(grid) > high + cls._EDGE:
            issues.append(
                f"{config.experiment.value} grid [{min(grid):.6g}, {max(grid):.6g}] "
                f"leaves the tested range [{low:.6g}, {high:.6g}]"
            )

        if not cls.TESTED_PUMP[0] <= config.pump <= cls.TESTED_PUMP[1]:
            issues.append(
                f"pump {config.pump:.6g} outside tested range {cls.TESTED_PUMP}"
            )

        gated = config.experiment in (
            ExperimentKind.RZ_SWEEP,
            ExperimentKind.RX_SWEEP,
            ExperimentKind.ZZ_SWEEP,
        )
        if gated and not (
            cls.TESTED_GATE_TIME[0] <= config.gate_time <= cls.TESTED_GATE_TIME[1]
        ):
            issues.append(
                f"gate_time {config.gate_time:.6g} outside tested range "
                f"{cls.TESTED_GATE_TIME}"
            )

        # Largest amplitude that occurs in the sweep
        alpha = math.sqrt(config.pump)
        if config.experiment is ExperimentKind.SPECTRUM_SWEEP:
            alpha = math.sqrt(max(0.0, max(grid)))
        if alpha**2 + 6.0 * alpha > config.n_max:
            issues.append(
                f"n_max={config.n_max} too small for |alpha|={alpha:.4g} "
                f"(needs |alpha|^2 + 6|alpha| <= n_max)"
            )

        if config.step > cls.MAX_STEP:
            issues.append(f"step {config.step:.3g} above {cls.MAX_STEP:.3g}")

        return issues

    @classmethod
    def enforce(cls, config: SweepConfig, policy: Optional[str] = None) -> List[str]:
        """
        Apply the range policy: 'warn' logs each issue, 'error' rejects the
        configuration with a ConfigError.
        """
        policy = policy or config.range_policy
        if policy not in ("warn", "error"):
            raise ConfigError(f"Unknown range policy '{policy}'.")

        issues = cls.find_issues(config)
        if issues and policy == "error":
            for issue in issues:
                logger.error("Validation Failed: %s", issue)
            raise ConfigError("; ".join(issues))

        for issue in issues:
            logger.warning("Validation: %s", issue)
        return issues
