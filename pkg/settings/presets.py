"""
Payoff presets for elw-lab.

Tables are plain nested lists (row = Alice's outcome, column = Bob's outcome)
so this module stays free of engine imports.
"""

import re
from typing import Dict, List, Optional

DEFAULT_PAYOFF_PRESET = "pd-3-0-5-1"


def _rstp(r: float, s: float, t: float, p: float) -> Dict:
    """Two-strategy symmetric game from the classical (r, s, t, p) table."""
    return {
        "n": 2,
        "alice": [[r, s], [t, p]],
        "bob": [[r, t], [s, p]],
        "symmetric": True,
    }


def _diagonal_coordination(values: List[float]) -> Dict:
    n = len(values)
    table = [[values[i] if i == j else 0.0 for j in range(n)] for i in range(n)]
    return {
        "n": n,
        "alice": [row[:] for row in table],
        "bob": [row[:] for row in table],
        "symmetric": True,
    }


PAYOFF_PRESETS = {
    # Prisoner's Dilemma, t > r > p > s
    "pd-3-0-5-1": _rstp(3.0, 0.0, 5.0, 1.0),
    # Both players are maximized at (C, C)
    "coordination-2": _diagonal_coordination([2.0, 1.0]),
    "coordination-3": _diagonal_coordination([3.0, 2.0, 1.0]),
}

_ZERO_PRESET = re.compile(r"^zero-(\d+)$")


def get_payoff_preset(name: str) -> Optional[Dict]:
    """
    Look up a payoff preset by name.

    Besides the fixed presets, ``zero-<n>`` yields the all-zero n x n game.

    Returns:
        A fresh dictionary with keys n, alice, bob, symmetric, or None if unknown
    """
    if name in PAYOFF_PRESETS:
        preset = PAYOFF_PRESETS[name]
        return {
            "n": preset["n"],
            "alice": [row[:] for row in preset["alice"]],
            "bob": [row[:] for row in preset["bob"]],
            "symmetric": preset["symmetric"],
        }

    match = _ZERO_PRESET.match(name)
    if match:
        n = int(match.group(1))
        if n >= 2:
            return {
                "n": n,
                "alice": [[0.0] * n for _ in range(n)],
                "bob": [[0.0] * n for _ in range(n)],
                "symmetric": True,
            }
    return None


def preset_names() -> List[str]:
    """Names accepted by get_payoff_preset, for error messages."""
    return sorted(PAYOFF_PRESETS) + ["zero-<n>"]
