from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np
from tqdm.autonotebook import tqdm

from gsm.estimators.estimator_spec import EstimatorSpec, estimate
from gsm.model.coefficients import CoefficientVector, NoiseLevel, quadratic_functional, sample_observation
from gsm.utils.random import RandomStream
from qfe.risklab.exact import RiskReport
from qfe.utils.logging import logger
from qfe.utils.misc import chunk_ranges, resolve_workers
from qfe.utils.stats import RiskStats

# replicates per task; fixed so that task boundaries never depend on the worker count
CHUNK_SIZE = 1_000
# full observation vectors are simulated, so the estimator must read a storable prefix
MAX_SIMULATED_LENGTH = 2 ** 24


def simulation_length(spec: EstimatorSpec, theta: CoefficientVector) -> int:
    length = max(spec.required_length, theta.max_index)
    if length > MAX_SIMULATED_LENGTH:
        raise ValueError(
            f'{spec} with theta up to index {theta.max_index} needs {length} simulated coordinates; '
            f'the limit is {MAX_SIMULATED_LENGTH}'
        )
    return length

def _run_chunk(args) -> np.ndarray:
    spec, theta, n, length, master_seed, start, stop = args
    estimates = np.empty(stop - start)
    for offset, replicate in enumerate(range(start, stop)):
        observation = sample_observation(theta, n, length, RandomStream(master_seed, replicate))
        estimates[offset] = estimate(spec, observation, n)
    return estimates

def simulate_estimates(
    spec: EstimatorSpec,
    theta: CoefficientVector,
    n: NoiseLevel | float,
    replicates: int,
    master_seed: int,
    workers: int | None = 1,
    progress: bool = False,
) -> np.ndarray:
    """Estimates for replicates ``0..replicates-1``, replicate ``r`` drawn from stream ``(master_seed, r)``"""
    noise = n if isinstance(n, NoiseLevel) else NoiseLevel(float(n))
    spec.check_noise(noise)
    length = simulation_length(spec, theta)
    workers = resolve_workers(workers)
    tasks = [
        (spec, theta, noise, length, master_seed, start, stop)
        for start, stop in chunk_ranges(replicates, CHUNK_SIZE)
    ]
    logger.debug('Simulating %d replicates of length %d with %d workers', replicates, length, workers)

    if workers == 1 or len(tasks) == 1:
        chunks = [_run_chunk(task) for task in tqdm(tasks, desc='Monte Carlo', disable=not progress)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            # map yields in submission order, which fixes the reduction order
            chunks = list(tqdm(executor.map(_run_chunk, tasks), total=len(tasks),
                               desc='Monte Carlo', disable=not progress))
    return np.concatenate(chunks)

def mc_risk(
    spec: EstimatorSpec,
    theta: CoefficientVector,
    n: NoiseLevel | float,
    replicates: int,
    master_seed: int,
    workers: int | None = 1,
    progress: bool = False,
) -> RiskReport:
    """Empirical risk ``mean (Q_hat - Q(theta))**2``, bit-identical for any worker count.

    Args:
        spec: estimator to simulate
        theta: mean sequence
        n: noise level
        replicates: number of independent observation vectors, at least 2
        master_seed: seed shared by every replicate stream
        workers: process count, ``None`` to read ``QFE_WORKERS`` or use every CPU

    Returns:
        a ``RiskReport`` with the standard error of the squared errors
    """
    if replicates < 2:
        raise ValueError(f'Monte Carlo risk needs at least 2 replicates, got {replicates}')
    estimates = simulate_estimates(spec, theta, n, replicates, master_seed, workers, progress)
    target = quadratic_functional(theta)

    stats = RiskStats()
    for start, stop in chunk_ranges(replicates, CHUNK_SIZE):
        stats.update_step(estimates[start:stop] - target)
    scores = stats.compute()
    return RiskReport(
        bias=scores['bias'],
        variance=scores['variance'],
        risk=scores['risk'],
        std_error=scores['std_error'],
        replicates=scores['replicates'],
    )
