"""
elw-lab - Equilibrium Commands

``verify`` certifies or refutes configured candidate pairs; ``search`` runs
best-response dynamics from seeded random starts. Both emit EquilibriumReport
serializations and a flat summary table.
"""
from typing import List, Sequence

from engine.nash import EquilibriumReport, equilibrium_search, verify_equilibrium
from commands.base_command import BaseCommand, CommandResult
from systems.report import serialize_equilibrium

SUMMARY_HEADER = ["index", "status", "alice_payoff", "bob_payoff", "witness_side", "witness_gain", "witness_source"]


def _summary_rows(reports: Sequence[EquilibriumReport]) -> List[list]:
    rows = []
    for index, report in enumerate(reports):
        witness = report.witness
        rows.append([
            index,
            report.status.value,
            report.payoffs[0],
            report.payoffs[1],
            witness.side.value if witness else "",
            witness.gain if witness else "",
            witness.source if witness else "",
        ])
    return rows


def _result(reports: Sequence[EquilibriumReport]) -> CommandResult:
    counts = {}
    for report in reports:
        counts[report.status.value] = counts.get(report.status.value, 0) + 1
    return CommandResult(
        result={"reports": [serialize_equilibrium(r) for r in reports], "status_counts": counts},
        table=(SUMMARY_HEADER, _summary_rows(reports)),
    )


class VerifyCommand(BaseCommand):

    name = "verify"

    def run(self) -> CommandResult:
        solver = self.config.solver
        return _result([verify_equilibrium(self.game, pair, solver) for pair in self._candidates()])


class SearchCommand(BaseCommand):

    name = "search"

    def run(self) -> CommandResult:
        return _result(equilibrium_search(self.game, self.config.solver, map_fn=self.map_fn))
