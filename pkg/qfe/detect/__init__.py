from qfe.detect.sampler import AggregatedSampler
from qfe.detect.testing import (
    Calibration,
    Decision,
    DetectionOutcome,
    bisect_threshold,
    calibrate_a,
    decide,
    error_rates,
    family_error_rates,
    rescaled_alternatives,
    testing_exponent,
    testing_lower_bound,
)

__all__ = [
    'AggregatedSampler',
    'Calibration',
    'Decision',
    'DetectionOutcome',
    'bisect_threshold',
    'calibrate_a',
    'decide',
    'error_rates',
    'family_error_rates',
    'rescaled_alternatives',
    'testing_exponent',
    'testing_lower_bound',
]
