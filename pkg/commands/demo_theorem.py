"""
elw-lab - No-Equilibrium Demonstration

At maximal entanglement every candidate pair is either refuted by an analytic
counterstrategy or already gives both players the top entry of their tables.
This command draws Haar-random candidates, adds one steering candidate per
mutual-optimum cell, and replays every witness through the game to confirm
its gain.
"""
import logging
from typing import List, Tuple

from engine.chiral import StrategyPair
from engine.errors import NumericalIntegrityError
from engine.game import Side, mutual_optimum_cells, play
from engine.matcore import haar_random_special_unitary, make_rng
from engine.nash import nonexistence_witness, steering_pair
from commands.base_command import BaseCommand, CommandResult
from systems.report import serialize_pair, serialize_witness

logger = logging.getLogger(__name__)

_DEMO_KEY = 6


class DemoTheoremCommand(BaseCommand):
    """Witness table over random and steered candidates."""

    name = "demo-theorem"

    def _draw_candidates(self) -> List[Tuple[str, StrategyPair]]:
        n = self.game.n
        rng = make_rng(self.config.seed, _DEMO_KEY)
        candidates = [
            ("haar", StrategyPair(haar_random_special_unitary(n, rng), haar_random_special_unitary(n, rng)))
            for _ in range(self.config.demo.candidates)
        ]
        for cell in mutual_optimum_cells(self.game.payoffs):
            pair = steering_pair(self.game, cell)
            if pair is not None:
                candidates.append((f"steer:{cell[0]},{cell[1]}", pair))
        return candidates

    def run(self) -> CommandResult:
        self._maximally_entangled_f()
        epsilon = self.config.solver.epsilon
        payoffs = self.game.payoffs
        best = (payoffs.max_entry(Side.A), payoffs.max_entry(Side.B))

        entries, rows = [], []
        refuted = trivial = unexplained = 0
        gains = []
        for index, (source, pair) in enumerate(self._draw_candidates()):
            current = play(self.game, pair.uA, pair.uB)
            witness = nonexistence_witness(self.game, pair)
            if witness is None:
                optimal = all(current[k] >= best[k] - epsilon for k in range(2))
                if optimal:
                    trivial += 1
                else:
                    unexplained += 1
                    logger.warning("Demo: candidate %d has no witness yet is not optimal %s", index, current)
                entries.append({"index": index, "source": source, "pair": serialize_pair(pair),
                                "payoffs": list(current), "witness": None, "trivially_optimal": optimal})
                rows.append([index, source, current[0], current[1], "", "", "", optimal])
                continue

            if witness.side is Side.B:
                replay = play(self.game, pair.uA, witness.deviation)[1] - current[1]
            else:
                replay = play(self.game, witness.deviation, pair.uB)[0] - current[0]
            if abs(replay - witness.gain) > epsilon:
                raise NumericalIntegrityError(
                    f"witness for candidate {index} claims gain {witness.gain:.12g}, replay gives {replay:.12g}"
                )
            verified = replay > epsilon
            if verified:
                refuted += 1
                gains.append(replay)
            else:
                unexplained += 1
            entries.append({"index": index, "source": source, "pair": serialize_pair(pair),
                            "payoffs": list(current), "witness": serialize_witness(witness),
                            "replay_gain": replay, "replay_verified": verified})
            rows.append([index, source, current[0], current[1], witness.side.value, witness.gain, replay, False])

        total = len(entries)
        min_gain = min(gains) if gains else None
        summary = (f"{refuted}/{total} candidates refuted, {trivial} trivially optimal"
                   + (f", minimum witness gain {min_gain:.6g}" if min_gain is not None else ""))
        logger.info("Demo: %s", summary)
        return CommandResult(
            result={
                "candidates": entries,
                "summary": {
                    "total": total,
                    "refuted": refuted,
                    "trivially_optimal": trivial,
                    "unexplained": unexplained,
                    "min_witness_gain": min_gain,
                    "all_refuted_or_trivial": unexplained == 0,
                    "line": summary,
                },
            },
            table=(["index", "source", "alice_payoff", "bob_payoff", "witness_side",
                    "witness_gain", "replay_gain", "trivially_optimal"], rows),
        )
