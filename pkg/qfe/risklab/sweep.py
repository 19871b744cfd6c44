from __future__ import annotations

import pandas as pd
from tqdm.autonotebook import tqdm

from gsm.estimators.builders import make_estimator
from gsm.estimators.estimator_spec import EstimatorSpec
from gsm.model.adversarial import adversarial_family
from gsm.model.ball import BallSpec
from gsm.model.coefficients import CoefficientVector, NoiseLevel
from qfe.risklab.exact import RiskReport, exact_risk
from qfe.utils.logging import logger


def worst_case_risk(
    spec: EstimatorSpec,
    ball: BallSpec,
    n: NoiseLevel | float,
) -> tuple[CoefficientVector, RiskReport]:
    """Largest exact risk over the adversarial family; ties go to the earliest member"""
    theta, report, _ = worst_case_member(spec, ball, n)
    return theta, report

def worst_case_member(
    spec: EstimatorSpec,
    ball: BallSpec,
    n: NoiseLevel | float,
) -> tuple[CoefficientVector, RiskReport, int]:
    noise = n if isinstance(n, NoiseLevel) else NoiseLevel(float(n))
    family = adversarial_family(ball, spec, noise)
    best_index, best_report = 0, None
    for index, theta in enumerate(family):
        report = exact_risk(spec, theta, noise, ball)
        if best_report is None or report.risk > best_report.risk:
            best_index, best_report = index, report
    return family[best_index], best_report, best_index

def sweep(
    estimator: str,
    ball: BallSpec,
    n_grid: list[float],
    progress: bool = False,
    **params,
) -> pd.DataFrame:
    """Worst-case exact risk of a named estimator over a grid of noise levels.

    Returns:
        a frame with columns ``n, risk, bias, variance, theta_id`` where ``theta_id``
        is the position of the maximizer in the adversarial family
    """
    rows = []
    for n in tqdm(n_grid, desc='Sweeping n', disable=not progress):
        spec = make_estimator(estimator, ball, n, **params)
        _, report, index = worst_case_member(spec, ball, n)
        logger.debug('n=%g: worst case member %d with risk %g', n, index, report.risk)
        rows.append({
            'n': n,
            'risk': report.risk,
            'bias': report.bias,
            'variance': report.variance,
            'theta_id': index,
        })
    return pd.DataFrame(rows, columns=['n', 'risk', 'bias', 'variance', 'theta_id'])
