from gsm.analytics.gaussian import gauss_density, gauss_upper_tail, mills_ratio
from gsm.analytics.lemma import AuditPoint, Lemma1Report, lemma1_audit, lemma1_check
from gsm.analytics.moments import (
    ThresholdKind,
    ThresholdMoments,
    centering_constant,
    hard_moments,
    soft_moments,
    threshold_moment_arrays,
    threshold_moments,
)
from gsm.analytics.oracle import QuadratureError, oracle_sweep, quad_oracle

__all__ = [
    'gauss_density',
    'gauss_upper_tail',
    'mills_ratio',
    'AuditPoint',
    'Lemma1Report',
    'lemma1_audit',
    'lemma1_check',
    'ThresholdKind',
    'ThresholdMoments',
    'centering_constant',
    'hard_moments',
    'soft_moments',
    'threshold_moment_arrays',
    'threshold_moments',
    'QuadratureError',
    'oracle_sweep',
    'quad_oracle',
]
