from gsm.estimators.builders import make_estimator, truncated_quadratic
from gsm.estimators.estimator_spec import (
    EstimatorName,
    EstimatorSpec,
    EstimatorVariant,
    Provenance,
    ThresholdGap,
    estimate,
    soft_hard_gap,
)
from gsm.estimators.regions import omega_r_alpha, q4_efficiency_region
from gsm.estimators.schedule import Block, ThresholdSchedule

__all__ = [
    'make_estimator',
    'truncated_quadratic',
    'EstimatorName',
    'EstimatorSpec',
    'EstimatorVariant',
    'Provenance',
    'ThresholdGap',
    'estimate',
    'soft_hard_gap',
    'omega_r_alpha',
    'q4_efficiency_region',
    'Block',
    'ThresholdSchedule',
]
