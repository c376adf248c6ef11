"""
elw-lab - Base Command Class

This module provides the BaseCommand class which serves as the foundation for all
lab commands. It holds the shared experiment state and defines the interface that
command classes implement.
"""
import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from engine.chiral import StrategyPair
from engine.entangle import FMatrix, initial_f_matrix
from engine.errors import ConfigError, PreconditionError
from engine.nash import classical_candidates
from settings.config import ExperimentConfig

logger = logging.getLogger(__name__)

Table = Tuple[Sequence[str], List[Sequence[Any]]]


@dataclass
class CommandResult:
    """What a command hands back to the report writer."""
    result: Dict[str, Any]
    table: Optional[Table] = None


class BaseCommand:
    """
    Base class for all lab commands, providing common functionality and interface.
    All command implementations should inherit from this class.
    """

    name = "base"

    def __init__(self, config: ExperimentConfig, map_fn: Callable = map):
        """
        Initialize the base command.

        Args:
            config: The parsed experiment configuration
            map_fn: Ordered map used for independent solver restarts
        """
        self.config = config
        self.game = config.game
        self.map_fn = map_fn
        self.initialized = False

    def initialize(self):
        """
        Check the command's config blocks before any work is done.

        Override this method in command implementations.

        Raises:
            ConfigError: if a block the command needs is missing
        """
        self.initialized = True

    def run(self) -> CommandResult:
        """
        Execute the command.

        Override this method in command implementations.
        """
        raise NotImplementedError(f"command '{self.name}' does not implement run()")

    def execute(self) -> CommandResult:
        """Initialize if needed, then run."""
        if not self.initialized:
            self.initialize()
        logger.info("Command: running %s (n=%d, seed=%d)", self.name, self.game.n, self.config.seed)
        return self.run()

    def _require(self, value, block: str):
        if value is None:
            raise ConfigError(f"command '{self.name}' needs a '{block}' block", self.config.source)
        return value

    def _candidates(self) -> Sequence[StrategyPair]:
        """Configured pairs, or every classical pair when none are given."""
        if self.config.pairs:
            return self.config.pairs
        logger.info("Command: no pairs configured; using all %d classical pairs", self.game.n ** 2)
        return classical_candidates(self.game.n)

    def _maximally_entangled_f(self) -> FMatrix:
        f = initial_f_matrix(self.game)
        if not f.maximally_entangled:
            raise PreconditionError(
                f"command '{self.name}' needs a maximally entangled initial state; "
                f"residual is {f.residual:.3e}"
            )
        return f
