from dataclasses import dataclass, fields
import math

import numpy as np
import yaml

from gsm.estimators.estimator_spec import EstimatorName, EstimatorVariant
from gsm.model.ball import BallSpec
from gsm.model.coefficients import CoefficientVector
from gsm.utils.functional import parse_grid


class ConfigError(ValueError):
    """Raised when a configuration value violates the preconditions of the command it feeds"""


FLOAT_FIELDS = ('n', 'gamma', 'r', 'p', 'alpha', 'c', 'grid_step', 'constant', 'a', 'level')
INT_FIELDS = (
    'replicates', 'seed', 'workers', 'm', 'length', 'k', 'dim',
    'iterations', 'exact_block_limit', 'oracle_count', 'rules',
)
BOOL_FIELDS = ('exact', 'with_oracle')
# YAML lists are accepted for these and joined into the comma form
LIST_FIELDS = ('n_grid', 'alpha_grid', 'coefficients')


def _coerce(key: str, value):
    """Cast a file value to the type of its field; YAML leaves forms like ``1e4`` as strings"""
    if value is None:
        return None
    try:
        if key in FLOAT_FIELDS:
            return float(value)
        if key in INT_FIELDS:
            if isinstance(value, str) and value.strip().isdigit():
                return int(value)
            number = float(value) if isinstance(value, (str, float)) else value
            if isinstance(number, float) and not number.is_integer():
                raise ValueError(f'{value} is not an integer')
            return int(number)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f'Invalid value for "{key}": {exc}') from exc
    if key in BOOL_FIELDS and not isinstance(value, bool):
        raise ConfigError(f'"{key}" must be true or false, got {value!r}')
    if key in LIST_FIELDS and isinstance(value, (list, tuple)):
        return ','.join(str(item) for item in value)
    return value

def get_config(config_path: str) -> dict:
    """Load a YAML (or JSON) configuration file; JSON documents are valid YAML"""
    with open(config_path) as config_file:
        config = yaml.safe_load(config_file)
    if config is None:
        return {}
    if not isinstance(config, dict):
        raise ConfigError(f'{config_path} must hold a mapping at the top level')
    return config


@dataclass
class RunConfig:
    """Merged parameters of one subcommand run (file values overridden by flags)"""
    command: str
    ball: str | None = None
    estimator: str = 'q1'
    n: float | None = None
    n_grid: str | None = None
    theta: str = 'zero'
    exact: bool = True
    replicates: int = 10_000
    seed: int = 0
    workers: int | None = None
    output: str | None = None
    gamma: float | None = None
    r: float | None = None
    m: int | None = None
    length: int | None = None
    tail: str = 'soft'
    base: str | None = None
    p: float | None = None
    alpha: float | None = None
    alpha_grid: str | None = None
    k: int | None = None
    c: float = 0.001
    dim: int = 3
    grid_step: float = 1e-2
    coefficients: str | None = None
    constant: float = 0.0
    a: float | None = None
    level: float | None = None
    iterations: int = 20
    exact_block_limit: int = 10_000
    input: str | None = None
    with_oracle: bool = False
    oracle_count: int = 1000
    rules: int = 10
    log_level: str = 'INFO'

    @classmethod
    def from_sources(cls, command: str, file_config: dict, flags: dict) -> 'RunConfig':
        """``defaults:`` block, then the command's block, then explicit flags"""
        known = {field.name for field in fields(cls)} - {'command'}
        values = {}
        for source in (file_config.get('defaults') or {}, file_config.get(command) or {}):
            if not isinstance(source, dict):
                raise ConfigError(f'Configuration block for "{command}" must be a mapping')
            for key, value in source.items():
                key = key.replace('-', '_')
                if key not in known:
                    raise ConfigError(f'Unknown configuration key "{key}" for command {command}')
                values[key] = _coerce(key, value)
        for key, value in flags.items():
            if key in known and value is not None:
                values[key] = value
        return cls(command=command, **values)


def parse_ball(text: str) -> BallSpec:
    """``lp:p:alpha:M`` or ``besov:p:q:alpha:M`` (``q`` may be ``inf``)"""
    parts = text.strip().split(':')
    try:
        if parts[0] == 'lp' and len(parts) == 4:
            return BallSpec.lp(float(parts[1]), float(parts[2]), float(parts[3]))
        if parts[0] == 'besov' and len(parts) == 5:
            return BallSpec.besov(float(parts[1]), float(parts[2]), float(parts[3]), float(parts[4]))
    except ValueError as exc:
        raise ConfigError(f'Invalid ball "{text}": {exc}') from exc
    raise ConfigError(f'Invalid ball "{text}". Possible forms are lp:p:alpha:M and besov:p:q:alpha:M')

def parse_theta(text: str) -> CoefficientVector:
    """``zero``, ``spike:i:height`` or ``list:v1,v2,...``"""
    text = text.strip()
    try:
        if text == 'zero':
            return CoefficientVector.zeros()
        if text.startswith('spike:'):
            _, index, height = text.split(':')
            return CoefficientVector.spike(int(index), float(height))
        if text.startswith('list:'):
            values = [float(value) for value in text[len('list:'):].split(',') if value.strip()]
            return CoefficientVector.from_dense(np.array(values))
    except ValueError as exc:
        raise ConfigError(f'Invalid theta "{text}": {exc}') from exc
    raise ConfigError(f'Invalid theta "{text}". Possible forms are zero, spike:i:height and list:v1,v2,...')

def parse_coefficients(text: str) -> np.ndarray:
    try:
        values = np.array([float(value) for value in text.split(',') if value.strip()])
    except ValueError as exc:
        raise ConfigError(f'Invalid coefficient list "{text}": {exc}') from exc
    if values.size == 0 or not np.all(np.isfinite(values)):
        raise ConfigError(f'Coefficient list "{text}" must hold finite values')
    return values

def parse_n_grid(text: str) -> list[float]:
    """Noise levels as a grid of reals, or ``2^a:b:step`` for powers of two"""
    text = text.strip()
    try:
        if text.startswith('2^'):
            return [2.0 ** exponent for exponent in parse_grid(text[2:])]
        return parse_grid(text)
    except ValueError as exc:
        raise ConfigError(f'Invalid n grid "{text}": {exc}') from exc

def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)

def validate_run_config(config: RunConfig) -> None:
    """Check every numeric field the command uses before any computation starts"""
    command = config.command
    _require(config.replicates >= 2, f'replicates must be at least 2, got {config.replicates}')
    _require(config.seed >= 0, f'seed must be nonnegative, got {config.seed}')
    _require(config.workers is None or config.workers >= 1, f'workers must be positive, got {config.workers}')
    _require(config.m is None or config.m >= 1, f'm must be a positive integer, got {config.m}')
    _require(config.tail in ('soft', 'hard'), f'tail must be soft or hard, got {config.tail}')
    if config.n is not None:
        _require(math.isfinite(config.n) and config.n > 0, f'n must be a positive real, got {config.n}')
    if config.ball is not None:
        parse_ball(config.ball)

    if command in ('risk', 'sweep', 'detect'):
        allowed = EstimatorName.ALL + ((EstimatorVariant.DIAG_QUAD,) if command == 'risk' else ())
        _require(config.estimator in allowed,
                 f'Unsupported estimator "{config.estimator}". Possible values are {", ".join(allowed)}')
        if command == 'risk':
            _require(config.n is not None, 'risk needs --n')
            parse_theta(config.theta)
        else:
            _require(config.ball is not None, f'{command} needs --ball')
        if command == 'sweep':
            _require(config.n_grid is not None, 'sweep needs --n-grid')
            _require(all(n > 1 for n in parse_n_grid(config.n_grid)), 'every n in the grid must exceed 1')
        if config.estimator == 'q4':
            _require(config.gamma is not None and config.gamma > 1, f'q4 needs gamma > 1, got {config.gamma}')
        if config.estimator == 'q6':
            _require(config.r is not None and 0 < config.r < 1, f'q6 needs 0 < r < 1, got {config.r}')
        if config.estimator == 'diag_quad':
            _require(config.coefficients is not None, 'diag_quad needs --coefficients')
            parse_coefficients(config.coefficients)
    if command == 'risk' and not config.exact:
        _require(config.replicates >= 2, 'Monte Carlo risk needs at least two replicates')
    if command == 'rates':
        _require(config.p is not None and config.p > 0, f'rates needs p > 0, got {config.p}')
        _require(config.alpha_grid is not None, 'rates needs --alpha')
    if command == 'hull-check':
        _require(config.ball is not None, 'hull-check needs --ball')
        _require(parse_ball(config.ball).p < 2, 'hull-check needs a ball with p < 2')
        _require(1 <= config.dim <= 6, f'dim must lie in 1..6, got {config.dim}')
        _require(0 < config.grid_step <= 1e-2, f'grid_step must lie in (0, 0.01], got {config.grid_step}')
        _require(config.n is not None, 'hull-check needs --n')
        _require(config.rules >= 1, f'rules must be positive, got {config.rules}')
        if config.coefficients is not None:
            _require(parse_coefficients(config.coefficients).size <= config.dim,
                     f'more coefficients than the dimension {config.dim}')
    if command == 'lower-bound':
        _require(config.m is not None and config.m >= 1, 'lower-bound needs --m')
        _require(config.n is not None, 'lower-bound needs --n')
        _require(config.k is None or 1 <= config.k <= config.m, f'k must lie in [1, m], got {config.k}')
        _require(config.c >= 0, f'c must be nonnegative, got {config.c}')
    if command == 'detect':
        _require(config.replicates >= 100, f'detection needs at least 100 replicates, got {config.replicates}')
        _require(config.n is not None or config.n_grid is not None, 'detect needs --n or --n-grid')
        if config.a is None:
            _require(config.level is not None and 0 < config.level < 1,
                     f'calibration needs a level in (0, 1), got {config.level}')
        else:
            _require(config.a > 0, f'a must be positive, got {config.a}')
        _require(config.iterations >= 1, f'iterations must be positive, got {config.iterations}')
    if command == 'fit':
        _require(config.input is not None, 'fit needs --input')
