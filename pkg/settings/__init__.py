"""
Settings module for elw-lab.
Contains engine tolerances, solver defaults and run-time configuration knobs.
"""

import math

from .presets import PAYOFF_PRESETS, DEFAULT_PAYOFF_PRESET, get_payoff_preset

ENGINE_VERSION = "elw-lab 1.0.0"

# Numerical tolerances
UNITARY_TOL = 1e-10            # construction-time unitarity check
SPECIAL_DET_TOL = 1e-8         # |det U - 1| for SU(n) members
HERMITIAN_TOL = 1e-10
NORM_TOL = 1e-10
TRACE_TOL = 1e-10
PROB_CLAMP_TOL = 1e-12         # negative probabilities above -this are clamped to 0
MAXENT_TOL = 1e-8
SYMMETRY_TOL = 1e-8
ENTROPY_EIG_FLOOR = 1e-14
STABILIZER_TOL = 1e-10
PAYOFF_SLACK = 1e-9
REACH_TOL = 1e-10              # outcome probability deficit for a steering pair
EIGENVALUE_FLOOR = -1e-10      # density matrices
MAX_MATRIX_ENTRIES = 1 << 26

# Gate parameters
GAMMA_MIN = 0.0
GAMMA_MAX = math.pi / 2

# Solver defaults
DEFAULT_RESTARTS = 16
DEFAULT_MAX_ITERS = 500
DEFAULT_STEP_TOL = 1e-9
DEFAULT_EPSILON = 1e-6
DEFAULT_PROBE_COUNT = 256
DEFAULT_MAX_ROUNDS = 64
DEFAULT_SEED = 0
FD_STEP = 1e-5
STATIONARY_TOL = 1e-6          # gradient below which a stalled ascent still counts as converged
CYCLE_TOL = 1e-6

# Experiment defaults
DEFAULT_DEMO_CANDIDATES = 100
DEFAULT_SWEEP_STEPS = 50
DEFAULT_TUNE_RESTARTS = 8

# Reporting
CSV_SIGNIFICANT_DIGITS = 17
OUTPUT_FORMATS = ["json", "csv"]

# Environment
THREADS_ENV_VAR = "ELW_LAB_THREADS"
LOG_LEVEL_ENV_VAR = "ELW_LAB_LOG_LEVEL"

# Exit codes
EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_ERROR = 3

# Debug settings
DEBUG_MODE = False

__all__ = [
    'ENGINE_VERSION',
    'UNITARY_TOL',
    'SPECIAL_DET_TOL',
    'HERMITIAN_TOL',
    'NORM_TOL',
    'TRACE_TOL',
    'PROB_CLAMP_TOL',
    'MAXENT_TOL',
    'SYMMETRY_TOL',
    'ENTROPY_EIG_FLOOR',
    'STABILIZER_TOL',
    'PAYOFF_SLACK',
    'REACH_TOL',
    'EIGENVALUE_FLOOR',
    'MAX_MATRIX_ENTRIES',
    'GAMMA_MIN',
    'GAMMA_MAX',
    'DEFAULT_RESTARTS',
    'DEFAULT_MAX_ITERS',
    'DEFAULT_STEP_TOL',
    'DEFAULT_EPSILON',
    'DEFAULT_PROBE_COUNT',
    'DEFAULT_MAX_ROUNDS',
    'DEFAULT_SEED',
    'FD_STEP',
    'STATIONARY_TOL',
    'CYCLE_TOL',
    'DEFAULT_DEMO_CANDIDATES',
    'DEFAULT_SWEEP_STEPS',
    'DEFAULT_TUNE_RESTARTS',
    'CSV_SIGNIFICANT_DIGITS',
    'OUTPUT_FORMATS',
    'THREADS_ENV_VAR',
    'LOG_LEVEL_ENV_VAR',
    'EXIT_OK',
    'EXIT_CONFIG_ERROR',
    'EXIT_NUMERICAL_ERROR',
    'DEBUG_MODE',
    'PAYOFF_PRESETS',
    'DEFAULT_PAYOFF_PRESET',
    'get_payoff_preset',
]
