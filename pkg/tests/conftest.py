"""Shared fixtures for the elw-lab test suite."""
import json
import math

import numpy as np
import pytest

from engine.game import GameInstance, N2Gamma, PayoffBimatrix, maximally_entangling_spec
from engine.matcore import haar_random_special_unitary, make_rng

PD = (3.0, 0.0, 5.0, 1.0)


def taylor_expm(a: np.ndarray, terms: int = 20) -> np.ndarray:
    """exp(a) by a truncated power series; an oracle independent of eigh."""
    result = np.eye(a.shape[0], dtype=np.complex128)
    term = np.eye(a.shape[0], dtype=np.complex128)
    for k in range(1, terms):
        term = term @ a / k
        result = result + term
    return result


@pytest.fixture
def series_expm():
    return taylor_expm


@pytest.fixture
def pd_payoffs():
    return PayoffBimatrix.from_rstp(*PD)


@pytest.fixture
def pd_game(pd_payoffs):
    """Factory for the Prisoner's Dilemma at a given gamma."""
    def build(gamma: float = math.pi / 2) -> GameInstance:
        return GameInstance.create(pd_payoffs, N2Gamma(gamma))
    return build


@pytest.fixture
def coordination_game():
    payoffs = PayoffBimatrix([[2.0, 0.0], [0.0, 1.0]], [[2.0, 0.0], [0.0, 1.0]], symmetric_game=True)
    return GameInstance.create(payoffs, N2Gamma(math.pi / 2))


@pytest.fixture
def maxent_game_3():
    """Three-strategy coordination game behind a gate with F-tilde = I."""
    table = np.diag([3.0, 2.0, 1.0])
    return GameInstance.create(PayoffBimatrix(table, table, symmetric_game=True),
                               maximally_entangling_spec(3))


@pytest.fixture
def haar_stream():
    """Factory for reproducible Haar draws: haar_stream(n, seed) -> iterator."""
    def draws(n: int, seed: int = 0):
        rng = make_rng(seed)
        while True:
            yield haar_random_special_unitary(n, rng)
    return draws


@pytest.fixture
def write_config(tmp_path):
    """Write a config dict to tmp_path and return its path."""
    def write(document, name: str = "experiment.json"):
        path = tmp_path / name
        text = document if isinstance(document, str) else json.dumps(document, indent=2)
        path.write_text(text, encoding="utf-8")
        return path
    return write
