"""
Application Factory Module.

This module contains the function to create and configure the command-line
application.
"""

import logging

import click

from src.config import Config

__version__ = "2.0.0"


def create_cli(config_class: type[Config] = Config) -> click.Group:
    """
    Initialize the click application.
    """
    logging.basicConfig(level=config_class.LOG_LEVEL, format=config_class.LOG_FORMAT)
    logger = logging.getLogger(__name__)
    logger.debug("Initializing KPO simulator v%s", __version__)

    @click.group(name="kpo")
    @click.version_option(__version__, prog_name="kpo")
    @click.pass_context
    def cli(ctx: click.Context) -> None:
        """Deterministic simulator for Kerr parametric oscillator qubits."""
        ctx.obj = config_class

    from src.commands.sweeps import SWEEP_COMMANDS

    for command in SWEEP_COMMANDS:
        cli.add_command(command)

    from src.commands.tools import TOOL_COMMANDS

    for command in TOOL_COMMANDS:
        cli.add_command(command)

    return cli
