"""
elw-lab - Entropy Sweep Command

Entanglement entropy and maximal-entanglement residual of the initial state
over a gamma grid. The CSV form is ready for plotting.
"""
from engine.entangle import sweep_entropy
from engine.errors import ConfigError
from engine.game import CartanParams, N2Gamma
from commands.base_command import BaseCommand, CommandResult


class SweepEntropyCommand(BaseCommand):

    name = "sweep-entropy"

    def initialize(self):
        self._require(self.config.sweep, "sweep")
        if not isinstance(self.config.gate_spec, (N2Gamma, CartanParams)):
            raise ConfigError(
                "sweep-entropy needs an 'n2_gamma' or 'cartan' gate to sweep",
                self.config.source,
            )
        super().initialize()

    def run(self) -> CommandResult:
        rows = sweep_entropy(self.config.gate_spec, self.config.sweep.gammas)
        return CommandResult(
            result={"rows": [
                {"gamma": r.gamma, "entropy": r.entropy, "maxent_residual": r.maxent_residual}
                for r in rows
            ]},
            table=(["gamma", "entropy", "maxent_residual"],
                   [[r.gamma, r.entropy, r.maxent_residual] for r in rows]),
        )
