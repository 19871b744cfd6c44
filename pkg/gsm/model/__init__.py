from gsm.model.adversarial import adversarial_family
from gsm.model.ball import (
    BallKind,
    BallSpec,
    ball_norm,
    contains,
    quadratic_hull,
    spike_config,
    spike_height,
    tail_energy_bound,
)
from gsm.model.coefficients import (
    BesovIndex,
    CoefficientVector,
    NoiseLevel,
    quadratic_functional,
    sample_observation,
)

__all__ = [
    'adversarial_family',
    'BallKind',
    'BallSpec',
    'ball_norm',
    'contains',
    'quadratic_hull',
    'spike_config',
    'spike_height',
    'tail_energy_bound',
    'BesovIndex',
    'CoefficientVector',
    'NoiseLevel',
    'quadratic_functional',
    'sample_observation',
]
