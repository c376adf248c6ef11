"""
elw-lab - Main Entry Point

This is the command-line entry point for elw-lab. It parses arguments, loads the
experiment config, dispatches to the command modules and writes the report.

Usage:
    elw-lab <command> --config <path> [--seed <u64>] [--out <path>]
"""
import argparse
import logging
import os
import sys
from enum import Enum
from typing import Dict, List, Optional

from settings import (
    DEBUG_MODE, ENGINE_VERSION, EXIT_CONFIG_ERROR, EXIT_NUMERICAL_ERROR, EXIT_OK,
    LOG_LEVEL_ENV_VAR
)
from settings.config import ExperimentConfig, load_config
from engine.errors import ConfigError, ElwError
from systems.report import ReportWriter, envelope
from systems.workers import RestartPool, resolve_thread_count

logger = logging.getLogger("elw-lab")


class Command(Enum):
    """Enum of the command-line verbs."""
    PAYOFFS = "payoffs"
    SWEEP_ENTROPY = "sweep-entropy"
    COUNTER = "counter"
    VERIFY = "verify"
    SEARCH = "search"
    DEMO_THEOREM = "demo-theorem"
    TUNE_GATE = "tune-gate"


class Lab:
    """Runs one command against one config, loading command modules on demand."""

    def __init__(self, config: ExperimentConfig, pool: RestartPool):
        self.config = config
        self.pool = pool
        self.commands: Dict[Command, object] = {}

    def _initialize_command(self, command: Command):
        """Import and construct the command class the first time it is needed."""
        if command in self.commands:
            return self.commands[command]

        if command == Command.PAYOFFS:
            from commands.payoffs import PayoffsCommand as cls
        elif command == Command.SWEEP_ENTROPY:
            from commands.sweep_entropy import SweepEntropyCommand as cls
        elif command == Command.COUNTER:
            from commands.counter import CounterCommand as cls
        elif command == Command.VERIFY:
            from commands.equilibria import VerifyCommand as cls
        elif command == Command.SEARCH:
            from commands.equilibria import SearchCommand as cls
        elif command == Command.DEMO_THEOREM:
            from commands.demo_theorem import DemoTheoremCommand as cls
        elif command == Command.TUNE_GATE:
            from commands.tune_gate import TuneGateCommand as cls
        else:
            raise ConfigError(f"unhandled command {command}")

        instance = cls(self.config, map_fn=self.pool.map)
        instance.initialize()
        self.commands[command] = instance
        return instance

    def run(self, command: Command) -> None:
        outcome = self._initialize_command(command).execute()
        logger.info("Lab: %s finished", command.value)
        document = envelope(command.value, self.config.resolved, outcome.result)
        ReportWriter(self.config.output.path, self.config.output.format).write(document, outcome.table)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="elw-lab",
        description="Quantized two-player N-strategy games: payoffs, entanglement and equilibria.",
    )
    parser.add_argument("--version", action="version", version=ENGINE_VERSION)
    parser.add_argument("command", choices=[c.value for c in Command])
    parser.add_argument("--config", required=True, help="JSON experiment config")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed (u64)")
    parser.add_argument("--out", default=None, help="report path; stdout when omitted")
    return parser


def configure_logging(environ=None) -> None:
    environ = os.environ if environ is None else environ
    default = "DEBUG" if DEBUG_MODE else "WARNING"
    level = environ.get(LOG_LEVEL_ENV_VAR, default).upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one command.

    Returns:
        EXIT_OK, EXIT_CONFIG_ERROR or EXIT_NUMERICAL_ERROR
    """
    args = build_parser().parse_args(argv)
    configure_logging()
    try:
        config = load_config(args.config, seed=args.seed, out=args.out)
        with RestartPool(resolve_thread_count()) as pool:
            Lab(config, pool).run(Command(args.command))
    except ConfigError as exc:
        sys.stderr.write(f"elw-lab: config error: {exc}\n")
        return EXIT_CONFIG_ERROR
    except ElwError as exc:
        sys.stderr.write(f"elw-lab: {exc}\n")
        return exc.exit_code
    except FloatingPointError as exc:
        sys.stderr.write(f"elw-lab: numerical failure: {exc}\n")
        return EXIT_NUMERICAL_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
