"""
elw-lab - Counterstrategy Command

Given Alice's strategy V and a target pair, builds Bob's counterstrategy W and
replays (V, W) to check that it lands on the target's outcome distribution.
The coset decomposition of the target relative to V is reported alongside.
"""
import logging

import numpy as np

from settings import REACH_TOL
from engine.chiral import counterstrategy, decompose, is_stabilizer
from engine.game import final_state, initial_state, outcome_distribution, play
from engine.matcore import phase_aligned_distance
from commands.base_command import BaseCommand, CommandResult
from systems.report import serialize_pair
from utils.codec import encode_matrix, real_table

logger = logging.getLogger(__name__)


class CounterCommand(BaseCommand):
    """Counterstrategy construction with replay verification."""

    name = "counter"

    def initialize(self):
        self._require(self.config.counter, "counter")
        super().initialize()

    def run(self) -> CommandResult:
        v = self.config.counter.v
        target = self.config.counter.target
        f = self._maximally_entangled_f()

        w = counterstrategy(v, target, f)
        replayed = outcome_distribution(final_state(self.game, v, w)).probs
        expected = outcome_distribution(final_state(self.game, target.uA, target.uB)).probs
        deviation = float(np.max(np.abs(replayed - expected)))
        verified = deviation <= REACH_TOL
        if not verified:
            logger.warning("Counter: replay deviates from target by %.3e", deviation)

        split = decompose(target, v, f)
        stab = is_stabilizer(split.stab_pair, initial_state(self.game))
        rebuilt = split.reconstruct()
        reconstruction = max(
            phase_aligned_distance(rebuilt.uA.matrix, target.uA.matrix),
            phase_aligned_distance(rebuilt.uB.matrix, target.uB.matrix),
        )

        return CommandResult(result={
            "w": encode_matrix(w.matrix),
            "replay": {
                "outcome_distribution": real_table(replayed),
                "target_distribution": real_table(expected),
                "max_deviation": deviation,
                "payoffs": list(play(self.game, v, w)),
                "target_payoffs": list(play(self.game, target.uA, target.uB)),
                "verified": verified,
            },
            "decomposition": {
                "rep_pair": serialize_pair(split.rep_pair),
                "stab_pair": serialize_pair(split.stab_pair),
                "stabilizer_residual": stab.residual,
                "reconstruction_error": reconstruction,
            },
        })
