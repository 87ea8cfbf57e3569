"""
Main entry point for the KPO qubit simulator.

This script builds the click application using the factory pattern
and dispatches to the requested subcommand.
"""

import click

from src import create_cli

# Initialize the application instance
cli: click.Group = create_cli()

if __name__ == "__main__":
    cli()
