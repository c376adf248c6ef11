"""
elw-lab - Command Modules

One class per command-line verb, all derived from BaseCommand.
"""

from .base_command import BaseCommand, CommandResult
from .payoffs import PayoffsCommand
from .sweep_entropy import SweepEntropyCommand
from .counter import CounterCommand
from .equilibria import SearchCommand, VerifyCommand
from .demo_theorem import DemoTheoremCommand
from .tune_gate import TuneGateCommand

__all__ = [
    'BaseCommand',
    'CommandResult',
    'PayoffsCommand',
    'SweepEntropyCommand',
    'CounterCommand',
    'VerifyCommand',
    'SearchCommand',
    'DemoTheoremCommand',
    'TuneGateCommand',
]
