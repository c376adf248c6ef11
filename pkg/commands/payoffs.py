"""
elw-lab - Payoffs Command

Expected payoffs and outcome distributions for configured strategy pairs,
alongside the pure equilibria of the unquantized table.
"""
from engine.game import classical_pure_equilibria, expected_payoffs, final_state, outcome_distribution
from commands.base_command import BaseCommand, CommandResult
from systems.report import serialize_pair
from utils.codec import real_table


class PayoffsCommand(BaseCommand):
    """Plays each configured pair once through the quantized game."""

    name = "payoffs"

    def run(self) -> CommandResult:
        rows = []
        results = []
        for index, pair in enumerate(self._candidates()):
            dist = outcome_distribution(final_state(self.game, pair.uA, pair.uB))
            alice, bob = expected_payoffs(dist, self.game.payoffs)
            results.append({
                "pair": serialize_pair(pair),
                "outcome_distribution": real_table(dist.probs),
                "payoffs": [alice, bob],
            })
            rows.append([index, alice, bob])
        return CommandResult(
            result={
                "pairs": results,
                "classical_pure_equilibria": [list(cell) for cell in classical_pure_equilibria(self.game.payoffs)],
            },
            table=(["pair", "alice_payoff", "bob_payoff"], rows),
        )
