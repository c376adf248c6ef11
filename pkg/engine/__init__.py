"""
Engine package for elw-lab.
Contains the numerical core: linear algebra, the quantized game, entanglement
diagnostics, the chiral group machinery and the Nash tools.
"""

from .errors import (
    ConfigError, ElwError, NumericalIntegrityError, PreconditionError, SizingError,
    ValidationError
)
from .matcore import (
    Subsystem, UnitaryMatrix, haar_random_special_unitary, kron, partial_trace,
    unitary_from_hermitian
)
from .game import (
    CartanParams, ExplicitUnitary, GameInstance, GateOperator, GateRotation,
    N2Gamma, OutcomeDistribution, PayoffBimatrix, Side, StateVector, build_gate,
    expected_payoffs, final_state, initial_state, outcome_distribution, play
)
from .entangle import (
    DensityMatrix, FMatrix, entanglement_entropy, f_matrix_of, is_maximally_entangled
)
from .chiral import (
    CosetDecomposition, StrategyPair, counterstrategy, decompose, is_stabilizer,
    stabilizer_partner
)
from .nash import (
    BestResponseResult, EquilibriumReport, EquilibriumStatus, SolverConfig,
    best_response, equilibrium_search, nonexistence_witness, verify_equilibrium
)

__all__ = [
    'ConfigError',
    'ElwError',
    'NumericalIntegrityError',
    'PreconditionError',
    'SizingError',
    'ValidationError',
    'Subsystem',
    'UnitaryMatrix',
    'haar_random_special_unitary',
    'kron',
    'partial_trace',
    'unitary_from_hermitian',
    'CartanParams',
    'ExplicitUnitary',
    'GameInstance',
    'GateOperator',
    'GateRotation',
    'N2Gamma',
    'OutcomeDistribution',
    'PayoffBimatrix',
    'Side',
    'StateVector',
    'build_gate',
    'expected_payoffs',
    'final_state',
    'initial_state',
    'outcome_distribution',
    'play',
    'DensityMatrix',
    'FMatrix',
    'entanglement_entropy',
    'f_matrix_of',
    'is_maximally_entangled',
    'CosetDecomposition',
    'StrategyPair',
    'counterstrategy',
    'decompose',
    'is_stabilizer',
    'stabilizer_partner',
    'BestResponseResult',
    'EquilibriumReport',
    'EquilibriumStatus',
    'SolverConfig',
    'best_response',
    'equilibrium_search',
    'nonexistence_witness',
    'verify_equilibrium',
]
