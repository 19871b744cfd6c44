from __future__ import annotations

import math

import numpy as np

from gsm.analytics.gaussian import truncated_chi2_upper
from gsm.analytics.moments import (
    ThresholdKind,
    null_exceedance_probability,
    threshold_moment_arrays,
    threshold_moments,
)
from gsm.estimators.estimator_spec import EstimatorSpec, EstimatorVariant
from gsm.model.coefficients import CoefficientVector, NoiseLevel
from gsm.utils.functional import stable_sum
from gsm.utils.random import RandomStream

# expected exceedances per block up to which null coordinates are simulated exactly
EXACT_BLOCK_LIMIT = 10_000
# nonzero coordinates per block up to which the support is simulated exactly
EXACT_SUPPORT_LIMIT = 256
# replicate rows per dense draw for diagonal quadratic rules
DIAG_CHUNK_ROWS = 256


class AggregatedSampler:
    """Draws of an estimator under ``theta`` through per-block sufficient statistics.

    The quadratic part is a scaled noncentral chi-square. In each threshold block the
    zero coordinates contribute a binomial number of exceedances with truncated
    chi-square excesses (or, when many exceedances are expected, a normal draw with the
    exact null mean and variance); the nonzero coordinates are simulated exactly when
    few, otherwise by a normal draw with their exact moments. The sequence of draws
    depends on the support layout only, so rescaling ``theta`` keeps common random numbers.
    """

    def __init__(
        self,
        spec: EstimatorSpec,
        n: NoiseLevel | float,
        exact_block_limit: int = EXACT_BLOCK_LIMIT,
        exact_support_limit: int = EXACT_SUPPORT_LIMIT,
    ) -> None:
        self.spec = spec
        self.noise = n if isinstance(n, NoiseLevel) else NoiseLevel(float(n))
        spec.check_noise(self.noise)
        if exact_block_limit < 0 or exact_support_limit < 0:
            raise ValueError('Sampler limits must be nonnegative')
        self.exact_block_limit = exact_block_limit
        self.exact_support_limit = exact_support_limit

    def draw(self, theta: CoefficientVector, replicates: int, stream: RandomStream) -> np.ndarray:
        rng = stream.generator()
        if self.spec.variant == EstimatorVariant.DIAG_QUAD:
            return self._draw_diag_quad(theta, replicates, rng)

        noise = self.noise
        m = self.spec.m
        _, head = theta.restrict(0, m)
        noncentrality = noise.n * stable_sum(head ** 2)
        if noncentrality > 0:
            chi2 = rng.noncentral_chisquare(m, noncentrality, replicates)
        else:
            chi2 = rng.chisquare(m, replicates)
        estimates = chi2 / noise.n - m / noise.n

        if self.spec.variant == EstimatorVariant.THRESH:
            kind = self.spec.schedule.tail_kind
            for block in self.spec.schedule.blocks():
                _, values = theta.restrict(block.lower, block.upper)
                threshold = block.tau / noise.n
                estimates += self._support_terms(values, threshold, kind, replicates, rng)
                estimates += self._null_terms(block.size - values.size, block.tau, kind, replicates, rng)
                estimates -= block.size * block.centering
        return estimates

    def _support_terms(self, values, threshold, kind, replicates, rng) -> np.ndarray:
        if values.size == 0:
            return np.zeros(replicates)
        if values.size <= self.exact_support_limit:
            observations = values + self.noise.sigma * rng.standard_normal((replicates, values.size))
            squares = observations ** 2
            if kind == ThresholdKind.SOFT:
                terms = np.maximum(squares - threshold, 0.0)
            else:
                terms = np.where(squares > threshold, squares, 0.0)
            return terms.sum(axis=1)
        m1, m2 = threshold_moment_arrays(values, self.noise, threshold, kind)
        mean = stable_sum(m1)
        spread = math.sqrt(stable_sum(np.maximum(m2 - m1 * m1, 0.0)))
        return rng.normal(mean, spread, replicates)

    def _null_terms(self, count: int, tau: float, kind, replicates, rng) -> np.ndarray:
        if count <= 0:
            return np.zeros(replicates)
        probability = null_exceedance_probability(tau)
        if count * probability <= self.exact_block_limit:
            exceedances = rng.binomial(count, probability, replicates)
            total = int(exceedances.sum())
            draws = truncated_chi2_upper(total, tau, rng)
            if kind == ThresholdKind.SOFT:
                draws = draws - tau
            owners = np.repeat(np.arange(replicates), exceedances)
            return np.bincount(owners, weights=draws, minlength=replicates) / self.noise.n
        null = threshold_moments(0.0, self.noise, tau / self.noise.n, kind)
        return rng.normal(count * null.m1, math.sqrt(count * null.variance), replicates)

    def _draw_diag_quad(self, theta, replicates, rng) -> np.ndarray:
        coefficients = self.spec.coefficients
        mean = theta.to_dense(max(coefficients.size, theta.max_index))[:coefficients.size]
        estimates = np.empty(replicates)
        for start in range(0, replicates, DIAG_CHUNK_ROWS):
            stop = min(start + DIAG_CHUNK_ROWS, replicates)
            observations = mean + self.noise.sigma * rng.standard_normal((stop - start, coefficients.size))
            estimates[start:stop] = (observations ** 2) @ coefficients + self.spec.constant
        return estimates
