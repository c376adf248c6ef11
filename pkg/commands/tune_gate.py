"""
elw-lab - Gate Tuning Command

Searches Cartan gate parameters for a maximally entangled initial state at the
configured n and reports the best parameters found.
"""
from engine.entangle import tune_cartan_gate
from commands.base_command import BaseCommand, CommandResult


class TuneGateCommand(BaseCommand):

    name = "tune-gate"

    def run(self) -> CommandResult:
        tune = self.config.tune
        found = tune_cartan_gate(self.game.n, self.config.seed, tune.restarts, rotation=tune.rotation)
        return CommandResult(
            result={
                "gate": {"variant": "cartan", "gammas": list(found.spec.gammas),
                         "rotation": found.spec.rotation.value},
                "maxent_residual": found.residual,
                "entropy": found.entropy,
                "restarts": found.restarts,
            },
            table=(["parameter", "gamma"], [[k, g] for k, g in enumerate(found.spec.gammas)]),
        )
