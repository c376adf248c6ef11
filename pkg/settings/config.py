"""
Experiment configuration for elw-lab.

A config is a single JSON document. Complex matrices are flat lists of reals,
row-major with real and imaginary parts interleaved; strategies may also be
named ("C", "D", "I" or "classical:<k>"). Angles accept numbers or simple
multiples of pi such as "pi/2" or "3*pi/8".
"""

import json
import json.decoder
import json.scanner
import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from settings import (
    DEFAULT_DEMO_CANDIDATES, DEFAULT_EPSILON, DEFAULT_MAX_ITERS, DEFAULT_MAX_ROUNDS,
    DEFAULT_PAYOFF_PRESET, DEFAULT_PROBE_COUNT, DEFAULT_RESTARTS, DEFAULT_SEED,
    DEFAULT_STEP_TOL, DEFAULT_SWEEP_STEPS, DEFAULT_TUNE_RESTARTS, OUTPUT_FORMATS,
    SPECIAL_DET_TOL
)
from settings.presets import get_payoff_preset, preset_names
from engine.chiral import StrategyPair
from engine.errors import ConfigError, ValidationError
from engine.game import (
    CartanParams, ExplicitUnitary, GameInstance, GateRotation, GateSpec, N2Gamma,
    PayoffBimatrix, classical_strategy, maximally_entangling_spec
)
from engine.matcore import UnitaryMatrix, det_residual
from engine.nash import SolverConfig
from utils.codec import decode_matrix, encode_matrix, real_table

logger = logging.getLogger(__name__)

GATE_VARIANTS = ["n2_gamma", "cartan", "explicit", "maxent"]
_GATE_KEYS = {"n2_gamma": "gamma", "cartan": "gammas", "explicit": "matrix", "maxent": "completion"}

_ANGLE = re.compile(
    r"^\s*(?P<sign>-)?\s*(?:(?P<coef>\d+(?:\.\d*)?)\s*\*?\s*)?pi\s*(?:/\s*(?P<den>\d+(?:\.\d*)?))?\s*$"
)
_CLASSICAL = re.compile(r"^classical:(\d+)$")


@dataclass(frozen=True)
class SweepConfig:
    gammas: Tuple[float, ...]


@dataclass(frozen=True, eq=False)
class CounterConfig:
    v: UnitaryMatrix
    target: StrategyPair


@dataclass(frozen=True)
class DemoConfig:
    candidates: int


@dataclass(frozen=True)
class TuneConfig:
    restarts: int
    rotation: GateRotation


@dataclass(frozen=True)
class OutputConfig:
    path: Optional[str]
    format: str


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """A parsed, validated experiment plus its resolved JSON form for provenance."""
    source: str
    game: GameInstance
    gate_spec: GateSpec
    seed: int
    solver: SolverConfig
    pairs: Tuple[StrategyPair, ...]
    sweep: Optional[SweepConfig]
    counter: Optional[CounterConfig]
    demo: DemoConfig
    tune: TuneConfig
    output: OutputConfig
    resolved: Dict[str, Any]

    @property
    def n(self) -> int:
        return self.game.n


def parse_angle(value: Any) -> float:
    """A float, or a string like "pi", "pi/4", "3*pi/8", "-0.5pi"."""
    if isinstance(value, bool):
        raise ValueError(f"not an angle: {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        match = _ANGLE.match(value)
        if match:
            coef = float(match.group("coef") or 1.0)
            den = float(match.group("den") or 1.0)
            sign = -1.0 if match.group("sign") else 1.0
            return sign * coef * math.pi / den
        return float(value)
    raise ValueError(f"not an angle: {value!r}")


class _LocatedDict(dict):
    """A decoded JSON object that remembers the lines it spans."""
    first_line = 1
    last_line = None


def _decode_located(text: str) -> Any:
    """json.loads, except that every object comes back as a _LocatedDict."""
    decoder = json.JSONDecoder()

    def parse_object(s_and_end, *args, **kwargs):
        source, start = s_and_end
        value, end = json.decoder.JSONObject(s_and_end, *args, **kwargs)
        located = _LocatedDict(value)
        located.first_line = source.count("\n", 0, start) + 1
        located.last_line = source.count("\n", 0, end) + 1
        return located, end

    decoder.parse_object = parse_object
    # the C scanner does not dispatch through parse_object
    decoder.scan_once = json.scanner.py_make_scanner(decoder)
    return decoder.decode(text)


class _ConfigReader:
    """Parses one config document, reporting errors with file and line."""

    def __init__(self, text: str, source: str):
        self.text = text
        self.source = source
        self.lines = text.splitlines()

    def line_of(self, key: Optional[str], block: Any = None) -> Optional[int]:
        """First line inside ``block`` naming ``key``; the block's own line if the key is absent."""
        located = isinstance(block, _LocatedDict)
        first = block.first_line if located else 1
        last = (block.last_line or len(self.lines)) if located else len(self.lines)
        if key is not None:
            needle = f'"{key}"'
            for number in range(first, min(last, len(self.lines)) + 1):
                if needle in self.lines[number - 1]:
                    return number
        return first if located else None

    def fail(self, message: str, key: Optional[str] = None, block: Any = None) -> ConfigError:
        return ConfigError(message, self.source, self.line_of(key, block))

    def load(self) -> Dict[str, Any]:
        try:
            document = _decode_located(self.text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc.msg}", self.source, exc.lineno) from exc
        if not isinstance(document, dict):
            raise self.fail("config must be a JSON object")
        return document

    def section(self, document: Dict[str, Any], key: str, required: bool = False) -> Dict[str, Any]:
        value = document.get(key)
        if value is None:
            if required:
                raise self.fail(f"missing required section '{key}'")
            return {}
        if not isinstance(value, dict):
            raise self.fail(f"section '{key}' must be an object", key, document)
        return value

    def integer(self, block: Dict[str, Any], key: str, default: int, minimum: int = 1) -> int:
        value = block.get(key, default)
        if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
            raise self.fail(f"'{key}' must be an integer >= {minimum}, got {value!r}", key, block)
        return value

    def real(self, block: Dict[str, Any], key: str, default: float) -> float:
        value = block.get(key, default)
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise self.fail(f"'{key}' must be a finite number, got {value!r}", key, block)
        return float(value)

    def angle(self, value: Any, key: str, block: Any = None) -> float:
        try:
            angle = parse_angle(value)
        except (TypeError, ValueError) as exc:
            raise self.fail(f"'{key}' is not an angle: {value!r}", key, block) from exc
        if not math.isfinite(angle):
            raise self.fail(f"'{key}' must be finite", key, block)
        return angle

    # game ---------------------------------------------------------------

    def payoffs(self, game: Dict[str, Any]) -> Tuple[PayoffBimatrix, Optional[str]]:
        name = game.get("preset")
        if name is None and "alice" not in game:
            name = DEFAULT_PAYOFF_PRESET
        if name is not None:
            preset = get_payoff_preset(str(name))
            if preset is None:
                raise self.fail(f"unknown payoff preset '{name}'; known: {', '.join(preset_names())}",
                                "preset", game)
            if "n" in game and game["n"] != preset["n"]:
                raise self.fail(f"preset '{name}' is {preset['n']}x{preset['n']}, config says n={game['n']}",
                                "n", game)
            alice, bob, symmetric = preset["alice"], preset["bob"], preset["symmetric"]
        else:
            if "bob" not in game:
                raise self.fail("payoff tables need both 'alice' and 'bob'", "alice", game)
            alice, bob = game["alice"], game["bob"]
            symmetric = bool(game.get("symmetric", False))
        try:
            payoffs = PayoffBimatrix(alice, bob, symmetric_game=symmetric)
        except (ValidationError, ValueError, TypeError) as exc:
            raise self.fail(f"invalid payoff tables: {exc}", "alice", game) from exc
        if "n" in game and game["n"] != payoffs.n:
            raise self.fail(f"payoff tables are {payoffs.n}x{payoffs.n}, config says n={game['n']}", "n", game)
        return payoffs, name

    def gate(self, block: Dict[str, Any], n: int) -> Tuple[GateSpec, Dict[str, Any]]:
        variant = block.get("variant", "n2_gamma")
        try:
            if variant == "n2_gamma":
                if n != 2:
                    raise self.fail("variant 'n2_gamma' needs n = 2", "variant", block)
                spec = N2Gamma(self.angle(block.get("gamma", math.pi / 2), "gamma", block))
                return spec, {"variant": variant, "gamma": spec.gamma}
            if variant == "cartan":
                raw = block.get("gammas", [0.0] * math.comb(n, 2))
                if not isinstance(raw, list):
                    raise self.fail("'gammas' must be a list", "gammas", block)
                gammas = tuple(self.angle(g, "gammas", block) for g in raw)
                rotation = GateRotation(block.get("rotation", "none"))
                spec = CartanParams(n, gammas, rotation)
                return spec, {"variant": variant, "gammas": list(spec.gammas), "rotation": rotation.value}
            if variant == "explicit":
                raw = block.get("matrix")
                if not isinstance(raw, list):
                    raise self.fail("'matrix' must be a list of interleaved reals", "matrix", block)
                spec = ExplicitUnitary(UnitaryMatrix(decode_matrix(raw, n * n)))
                return spec, {"variant": variant, "matrix": encode_matrix(spec.matrix.matrix)}
            if variant == "maxent":
                completion = block.get("completion", "householder")
                spec = maximally_entangling_spec(n, completion)
                return spec, {"variant": variant, "completion": completion}
        except (ValidationError, ValueError) as exc:
            raise self.fail(f"invalid gate: {exc}", _GATE_KEYS.get(variant, "gate"), block) from exc
        raise self.fail(f"gate variant '{variant}' is not one of {', '.join(GATE_VARIANTS)}", "variant", block)

    # strategies ---------------------------------------------------------

    def strategy(self, value: Any, n: int, key: str, block: Any = None) -> UnitaryMatrix:
        try:
            if isinstance(value, str):
                alias = value.strip()
                if alias in ("C", "I"):
                    return classical_strategy(n, 0)
                if alias == "D" and n == 2:
                    return classical_strategy(n, 1)
                match = _CLASSICAL.match(alias)
                if match:
                    return classical_strategy(n, int(match.group(1)))
                raise self.fail(f"unknown strategy name '{value}'", key, block)
            if not isinstance(value, list):
                raise self.fail(f"'{key}' must be a list of {2 * n * n} reals or a strategy name", key, block)
            matrix = decode_matrix(value, n)
            unitary = UnitaryMatrix(matrix)
        except ValidationError as exc:
            raise self.fail(f"invalid strategy '{key}': {exc}", key, block) from exc
        if det_residual(unitary.matrix) > SPECIAL_DET_TOL:
            logger.warning("Config: strategy '%s' has det != 1; re-phasing into SU(%d)", key, n)
        return UnitaryMatrix.special_from(unitary.matrix)

    def pair(self, block: Any, n: int, key: str, parent: Any = None) -> StrategyPair:
        if not isinstance(block, dict) or "alice" not in block or "bob" not in block:
            raise self.fail(f"'{key}' entries need 'alice' and 'bob' strategies", key,
                            block if isinstance(block, dict) else parent)
        return StrategyPair(self.strategy(block["alice"], n, "alice", block),
                            self.strategy(block["bob"], n, "bob", block))

    # sections -----------------------------------------------------------

    def solver(self, block: Dict[str, Any], seed: int) -> SolverConfig:
        try:
            return SolverConfig(
                restarts=self.integer(block, "restarts", DEFAULT_RESTARTS),
                max_iters=self.integer(block, "max_iters", DEFAULT_MAX_ITERS),
                step_tolerance=self.real(block, "step_tolerance", DEFAULT_STEP_TOL),
                epsilon=self.real(block, "epsilon", DEFAULT_EPSILON),
                probe_count=self.integer(block, "probe_count", DEFAULT_PROBE_COUNT),
                max_rounds=self.integer(block, "max_rounds", DEFAULT_MAX_ROUNDS),
                seed=seed,
            )
        except ValidationError as exc:
            raise self.fail(f"invalid solver settings: {exc}", "epsilon", block) from exc

    def sweep(self, block: Dict[str, Any]) -> Optional[SweepConfig]:
        if not block:
            return None
        if "gammas" in block:
            if not isinstance(block["gammas"], list) or not block["gammas"]:
                raise self.fail("'gammas' must be a non-empty list", "gammas", block)
            return SweepConfig(tuple(self.angle(g, "gammas", block) for g in block["gammas"]))
        start = self.angle(block.get("start", 0.0), "start", block)
        stop = self.angle(block.get("stop", math.pi / 2), "stop", block)
        steps = self.integer(block, "steps", DEFAULT_SWEEP_STEPS, minimum=2)
        return SweepConfig(tuple(float(g) for g in np.linspace(start, stop, steps)))


def load_config(path, seed: Optional[int] = None, out: Optional[str] = None) -> ExperimentConfig:
    """
    Read and validate an experiment config.

    Args:
        path: JSON config file
        seed: Overrides the config's "seed" when given
        out: Overrides the config's output path when given

    Raises:
        ConfigError: with file and line on any problem
    """
    source = str(path)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror or exc}", source) from exc
    return parse_config(text, source, seed=seed, out=out)


def parse_config(text: str, source: str = "<config>", seed: Optional[int] = None,
                 out: Optional[str] = None) -> ExperimentConfig:
    """Parse config text; see load_config."""
    reader = _ConfigReader(text, source)
    document = reader.load()

    if seed is None:
        seed = document.get("seed", DEFAULT_SEED)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 1 << 64:
        raise reader.fail(f"'seed' must be a 64-bit unsigned integer, got {seed!r}", "seed", document)

    game_block = reader.section(document, "game")
    payoffs, preset = reader.payoffs(game_block)
    n = payoffs.n
    gate_block = game_block.get("gate", {})
    if not isinstance(gate_block, dict):
        raise reader.fail("'gate' must be an object", "gate", game_block)
    gate_spec, gate_resolved = reader.gate(gate_block, n)
    try:
        game = GameInstance.create(payoffs, gate_spec)
    except ValidationError as exc:
        raise reader.fail(f"inconsistent game: {exc}", "gate", game_block) from exc

    raw_pairs = document.get("pairs", [])
    if not isinstance(raw_pairs, list):
        raise reader.fail("'pairs' must be a list", "pairs", document)
    pairs = tuple(reader.pair(p, n, "pairs", document) for p in raw_pairs)

    counter_block = reader.section(document, "counter")
    counter = None
    if counter_block:
        if "v" not in counter_block or "target" not in counter_block:
            raise reader.fail("'counter' needs 'v' and 'target'", "counter", document)
        counter = CounterConfig(reader.strategy(counter_block["v"], n, "v", counter_block),
                                reader.pair(counter_block["target"], n, "target", counter_block))

    solver = reader.solver(reader.section(document, "solver"), seed)
    sweep = reader.sweep(reader.section(document, "sweep"))
    demo_block = reader.section(document, "demo")
    demo = DemoConfig(reader.integer(demo_block, "candidates", DEFAULT_DEMO_CANDIDATES))
    tune_block = reader.section(document, "tune")
    try:
        rotation = GateRotation(tune_block.get("rotation", "fourier"))
    except ValueError as exc:
        raise reader.fail(f"unknown rotation {tune_block.get('rotation')!r}", "rotation", tune_block) from exc
    tune = TuneConfig(reader.integer(tune_block, "restarts", DEFAULT_TUNE_RESTARTS), rotation)

    output_block = reader.section(document, "output")
    output_format = output_block.get("format", "json")
    if output_format not in OUTPUT_FORMATS:
        raise reader.fail(f"output format '{output_format}' is not one of {', '.join(OUTPUT_FORMATS)}",
                          "format", output_block)
    output = OutputConfig(out if out is not None else output_block.get("path"), output_format)

    resolved = {
        "seed": seed,
        "game": {
            "n": n,
            "preset": preset,
            "alice": real_table(payoffs.alice),
            "bob": real_table(payoffs.bob),
            "symmetric": payoffs.symmetric_game,
            "gate": gate_resolved,
        },
        "solver": {
            "restarts": solver.restarts,
            "max_iters": solver.max_iters,
            "step_tolerance": solver.step_tolerance,
            "epsilon": solver.epsilon,
            "probe_count": solver.probe_count,
            "max_rounds": solver.max_rounds,
        },
        "pairs": [_encode_pair(p) for p in pairs],
        "counter": None if counter is None else {
            "v": encode_matrix(counter.v.matrix),
            "target": _encode_pair(counter.target),
        },
        "sweep": None if sweep is None else {"gammas": list(sweep.gammas)},
        "demo": {"candidates": demo.candidates},
        "tune": {"restarts": tune.restarts, "rotation": tune.rotation.value},
        "output": {"format": output.format},
    }

    return ExperimentConfig(
        source=source,
        game=game,
        gate_spec=gate_spec,
        seed=seed,
        solver=solver,
        pairs=pairs,
        sweep=sweep,
        counter=counter,
        demo=demo,
        tune=tune,
        output=output,
        resolved=resolved,
    )


def _encode_pair(pair: StrategyPair) -> Dict[str, List[float]]:
    return {"alice": encode_matrix(pair.uA.matrix), "bob": encode_matrix(pair.uB.matrix)}
