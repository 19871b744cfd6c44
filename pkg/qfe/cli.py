import argparse
import sys

import pandas as pd
from tqdm.autonotebook import tqdm
import yaml

from gsm.analytics.lemma import lemma1_audit
from gsm.analytics.moments import ThresholdKind
from gsm.analytics.oracle import QuadratureError, oracle_sweep
from gsm.bounds.affinity import (
    AFFINITY_CEILING,
    affinity_bound,
    chi_square_affinity,
    default_spike_count,
    mixture_cri_bound,
    mixture_risk_floor,
)
from gsm.bounds.exponents import information_bound
from gsm.estimators.builders import make_estimator
from gsm.estimators.estimator_spec import EstimatorSpec, EstimatorVariant
from gsm.model.ball import BallSpec, contains
from gsm.model.coefficients import NoiseLevel, quadratic_functional
from gsm.utils.functional import parse_grid
from gsm.utils.random import RandomStream
from qfe.constants import ORACLE_RTOL, Columns, Command, ExitCode
from qfe.detect.testing import bisect_threshold, family_error_rates, testing_exponent
from qfe.risklab.audits import variance_audit
from qfe.risklab.exact import exact_risk
from qfe.risklab.hull import hull_sup_equality
from qfe.risklab.monte_carlo import mc_risk
from qfe.risklab.rates import rate_fit, table1_exponents
from qfe.risklab.sweep import sweep
import qfe.utils.config as config_util
from qfe.utils.config import ConfigError, RunConfig
from qfe.utils.logging import LOG_LEVELS, init_logger, logger
from qfe.utils.misc import resolve_workers
import qfe.utils.output as output_util


def estimator_params(config: RunConfig) -> dict:
    return {
        'gamma': config.gamma,
        'r': config.r,
        'm_override': config.m,
        'length': config.length,
        'base': config.base,
        'tail_kind': config.tail,
    }

def build_estimator(config: RunConfig, ball: BallSpec | None, n: NoiseLevel) -> EstimatorSpec:
    if config.estimator == EstimatorVariant.DIAG_QUAD:
        coefficients = config_util.parse_coefficients(config.coefficients)
        return EstimatorSpec.diag_quad(coefficients, config.constant)
    return make_estimator(config.estimator, ball, n, **estimator_params(config))

def _is_soft_thresh(spec: EstimatorSpec) -> bool:
    return spec.variant == EstimatorVariant.THRESH and spec.schedule.tail_kind == ThresholdKind.SOFT

def _print_table(frame: pd.DataFrame, config: RunConfig) -> None:
    # stdout already carries the machine-readable output when no file is given
    if config.output not in (None, '-'):
        print(frame.to_string(index=False))

def _log_slope(ns, values, label: str):
    points = [(n, value) for n, value in zip(ns, values) if value > 0]
    if len(points) < 3:
        return None
    fit = rate_fit(points)
    logger.info('log-log slope of %s: %.4f (r^2 = %.4f)', label, fit.slope, fit.r_squared)
    return fit

def run_risk(config: RunConfig) -> int:
    ball = config_util.parse_ball(config.ball) if config.ball else None
    noise = NoiseLevel(config.n)
    spec = build_estimator(config, ball, noise)
    theta = config_util.parse_theta(config.theta)
    if ball is not None and not contains(ball, theta):
        logger.warning('theta = %s lies outside the ball %s', config.theta, ball)

    payload = {
        'format': output_util.FORMAT_VERSION,
        'estimator': str(spec),
        'n': noise.n,
        'theta': config.theta,
        'quadratic_functional': quadratic_functional(theta),
        'information_bound': information_bound(theta, noise),
    }
    if config.exact:
        report = exact_risk(spec, theta, noise, ball)
        payload['mode'] = 'exact'
    else:
        workers = resolve_workers(config.workers)
        logger.info('Simulating %d replicates with %d workers', config.replicates, workers)
        report = mc_risk(spec, theta, noise, config.replicates, config.seed, workers, progress=True)
        payload.update(mode='monte_carlo', seed=config.seed, replicates=config.replicates)
    payload['report'] = report.to_dict()
    output_util.write_json(payload, config.output)
    logger.info('%s at n=%g: risk %g (bias %g, variance %g)', spec, noise.n, report.risk, report.bias, report.variance)
    return ExitCode.OK

def run_sweep(config: RunConfig) -> int:
    ball = config_util.parse_ball(config.ball)
    n_grid = config_util.parse_n_grid(config.n_grid)
    params = estimator_params(config)
    frame = sweep(config.estimator, ball, n_grid, progress=True, **params)
    output_util.write_csv(frame[Columns.SWEEP], config.output)
    _print_table(frame, config)
    _log_slope(frame['n'], frame['risk'], f'the worst-case risk of {config.estimator}')

    status = ExitCode.OK
    for n in n_grid:
        spec = make_estimator(config.estimator, ball, n, **params)
        if not _is_soft_thresh(spec):
            continue
        failures = variance_audit(spec, ball, n)
        if failures:
            logger.error('Variance bound violated at n=%g by family members %s', n, failures)
            status = ExitCode.AUDIT_FAILURE
    return status

def run_rates(config: RunConfig) -> int:
    rows = []
    skipped = 0
    for alpha in parse_grid(config.alpha_grid):
        if alpha + 0.5 - 1.0 / config.p <= 0:
            skipped += 1
            rows.append({'alpha': alpha, 'r_star': None, 'r_q_star': None})
            continue
        r_star, r_q_star = table1_exponents(config.p, alpha)
        rows.append({'alpha': alpha, 'r_star': r_star, 'r_q_star': r_q_star})
    if skipped:
        logger.warning('%d alpha values give s <= 0 at p=%g; their exponents are left empty', skipped, config.p)
    frame = pd.DataFrame(rows, columns=Columns.RATES)
    output_util.write_csv(frame, config.output)
    _print_table(frame, config)
    return ExitCode.OK

def _oracle_check(config: RunConfig) -> bool:
    try:
        results = oracle_sweep(config.oracle_count, config.seed)
    except QuadratureError as exc:
        logger.error('%s', exc)
        return False
    worst = 0.0
    for args, closed, oracle in results:
        deviation = abs(closed - oracle) / abs(oracle) if oracle != 0 else abs(closed)
        if deviation > worst:
            worst = deviation
        if deviation > ORACLE_RTOL:
            logger.error('Closed form %r and quadrature %r disagree at %s', closed, oracle, args)
    logger.info('Largest relative deviation from quadrature over %d tuples: %.3g', len(results), worst)
    return worst <= ORACLE_RTOL

def run_lemma_check(config: RunConfig) -> int:
    rows = []
    for point in lemma1_audit():
        report = point.report
        rows.append({
            'tau': point.tau,
            'root_n_theta': point.root_n_theta,
            'n': point.n,
            'mu0': report.mu0,
            'bound_mu0': report.bound_mu0,
            'bias': report.bias,
            'bound_bias': report.bound_bias,
            'variance': report.variance,
            'bound_var': report.bound_var,
            'holds': report.all_bounds_hold,
        })
    frame = pd.DataFrame(rows, columns=Columns.LEMMA_CHECK)
    output_util.write_csv(frame, config.output)

    failures = frame[~frame['holds']]
    logger.info('%d of %d grid points satisfy all three bounds', len(frame) - len(failures), len(frame))
    status = ExitCode.OK
    if len(failures) > 0:
        logger.error('Bound violations:\n%s', failures.to_string(index=False))
        status = ExitCode.AUDIT_FAILURE
    if config.with_oracle and not _oracle_check(config):
        status = ExitCode.AUDIT_FAILURE
    return status

def run_hull_check(config: RunConfig) -> int:
    ball = config_util.parse_ball(config.ball)
    noise = NoiseLevel(config.n)
    if config.coefficients is not None:
        rules = [(config_util.parse_coefficients(config.coefficients), config.constant)]
        seed = None
    else:
        rng = RandomStream(config.seed, 0).generator()
        rules = [(rng.uniform(0.0, 2.0, config.dim), rng.uniform(-1.0, 1.0) / noise.n) for _ in range(config.rules)]
        seed = config.seed

    rows = []
    for index, (a, c) in enumerate(tqdm(rules, desc='Hull check')):
        check = hull_sup_equality(a, c, ball, config.dim, config.grid_step, noise)
        rows.append({
            'rule': index,
            'sup_ball': check.sup_ball,
            'sup_hull': check.sup_hull,
            'sup_vertices': check.sup_vertices,
            'tolerance': check.tolerance,
            'holds': check.holds,
        })
    frame = pd.DataFrame(rows, columns=Columns.HULL_CHECK)
    output_util.write_csv(frame, config.output, seed=seed)
    _print_table(frame, config)
    if not frame['holds'].all():
        logger.error('The ball and hull maxima differ beyond the grid tolerance for rules %s',
                     frame.loc[~frame['holds'], 'rule'].tolist())
        return ExitCode.AUDIT_FAILURE
    return ExitCode.OK

def run_lower_bound(config: RunConfig) -> int:
    m, n, c = config.m, config.n, config.c
    k = config.k if config.k is not None else default_spike_count(m)
    chi = chi_square_affinity(m, k)
    payload = {
        'format': output_util.FORMAT_VERSION,
        'm': m,
        'n': n,
        'k': k,
        'c': c,
        'chi_square_affinity': chi,
        'affinity_ceiling': AFFINITY_CEILING,
        'cri_lower_bound': mixture_cri_bound(m, n, c, k, affinity=chi),
        'cri_lower_bound_ceiling': mixture_cri_bound(m, n, c, k),
        'risk_floor': mixture_risk_floor(m, n, c),
    }
    status = ExitCode.OK
    if m >= 4 and k < m:
        bound = affinity_bound(m, k)
        payload['affinity_bound'] = bound
        if chi > bound:
            logger.error('chi-square affinity %r exceeds its bound %r (m=%d, k=%d)', chi, bound, m, k)
            status = ExitCode.AUDIT_FAILURE
    output_util.write_json(payload, config.output)
    return status

def run_detect(config: RunConfig) -> int:
    ball = config_util.parse_ball(config.ball)
    n_grid = config_util.parse_n_grid(config.n_grid) if config.n_grid else [config.n]
    calibrating = config.a is None

    rows = []
    for n in tqdm(n_grid, desc='Detection'):
        noise = NoiseLevel(n)
        spec = build_estimator(config, ball, noise)
        if calibrating:
            calibration = bisect_threshold(
                spec, noise, config.level, ball, config.replicates, config.seed,
                iterations=config.iterations, exact_block_limit=config.exact_block_limit,
            )
            outcome = calibration.outcome
            rows.append({
                'n': n, 'a': calibration.a, 'lower': calibration.lower,
                'type1': outcome.type1, 'max_type2': outcome.max_type2, 'sum': outcome.sum,
                'iterations': calibration.iterations,
            })
            logger.debug('n=%g: a=%g', n, calibration.a)
        else:
            outcome = family_error_rates(
                spec, noise, config.a, ball, config.replicates, config.seed,
                exact_block_limit=config.exact_block_limit,
            )
            rows.append({'n': n, **outcome.to_dict()})
    columns = Columns.DETECT_CALIBRATION if calibrating else Columns.DETECT_RATES
    frame = pd.DataFrame(rows, columns=columns)
    output_util.write_csv(frame, config.output, seed=config.seed, replicates=config.replicates)
    _print_table(frame, config)

    if calibrating:
        fit = _log_slope(frame['n'], frame['a'], 'the calibrated signal size')
        if fit is not None and ball.p < 2 and ball.alpha <= 1.0 / (2.0 * ball.p):
            logger.info('Optimal detection boundary slope: %.4f', -testing_exponent(ball.p, ball.alpha))
    return ExitCode.OK

def run_fit(config: RunConfig) -> int:
    frame = output_util.read_points_csv(config.input)
    fit = rate_fit(zip(frame['n'], frame['risk']))
    output_util.write_json({
        'format': output_util.FORMAT_VERSION,
        'input': config.input,
        'slope': fit.slope,
        'intercept': fit.intercept,
        'r_squared': fit.r_squared,
        'points': len(fit.points),
    }, config.output)
    return ExitCode.OK


COMMANDS = {
    Command.RISK: run_risk,
    Command.SWEEP: run_sweep,
    Command.RATES: run_rates,
    Command.LEMMA_CHECK: run_lemma_check,
    Command.HULL_CHECK: run_hull_check,
    Command.LOWER_BOUND: run_lower_bound,
    Command.DETECT: run_detect,
    Command.FIT: run_fit,
}


def _add_estimator_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--ball', help='lp:p:alpha:M or besov:p:q:alpha:M')
    parser.add_argument('--estimator', help='q1, q2, q3, q4, q5, q6, qtilde, truncated (risk also takes diag_quad)')
    parser.add_argument('--gamma', type=float, help='growth exponent of the q4 schedule')
    parser.add_argument('--r', type=float, help='target rate of q6')
    parser.add_argument('--m', type=int, help='override the length of the quadratic part')
    parser.add_argument('--length', type=int, help='truncation point of the q5/q6 tails')
    parser.add_argument('--tail', choices=('soft', 'hard'), help='thresholding rule of the tail')
    parser.add_argument('--base', help='soft estimator copied by qtilde (q2, q3 or q5)')

def _add_diag_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--coefficients', help='comma separated diagonal weights a_1,...,a_d')
    parser.add_argument('--constant', type=float, help='additive constant c of the diagonal rule')

def _add_sampling_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--replicates', type=int)
    parser.add_argument('--seed', type=int, help='master seed of every random stream')

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='qfe-lab', description='Quadratic functional estimation laboratory')
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config',
                        help='Path to a YAML or JSON config file (flags override its values)',
                        dest='config_file',
                        default=None)
    common.add_argument('--log-level', dest='log_level', type=str.upper, choices=LOG_LEVELS)
    common.add_argument('--output', help='output file, stdout when omitted or -')

    subparsers = parser.add_subparsers(dest='command', required=True)

    risk = subparsers.add_parser(Command.RISK, parents=[common], help='exact or Monte Carlo risk at one theta')
    _add_estimator_args(risk)
    _add_diag_args(risk)
    risk.add_argument('--n', type=float)
    risk.add_argument('--theta', help='zero, spike:i:height or list:v1,v2,...')
    mode = risk.add_mutually_exclusive_group()
    mode.add_argument('--exact', dest='exact', action='store_true', default=None)
    mode.add_argument('--mc', dest='exact', action='store_false', default=None)
    _add_sampling_args(risk)
    risk.add_argument('--workers', type=int, help='worker processes (default: QFE_WORKERS or every CPU)')

    sweep_parser = subparsers.add_parser(Command.SWEEP, parents=[common], help='worst-case risk over an n grid')
    _add_estimator_args(sweep_parser)
    sweep_parser.add_argument('--n-grid', dest='n_grid', help='start:stop:step, a comma list or 2^a:b:step')

    rates = subparsers.add_parser(Command.RATES, parents=[common], help='rate exponents over an alpha grid')
    rates.add_argument('--p', type=float)
    rates.add_argument('--alpha', dest='alpha_grid', help='start:stop:step or a comma list')

    lemma = subparsers.add_parser(Command.LEMMA_CHECK, parents=[common], help='thresholding bounds on the audit grid')
    lemma.add_argument('--with-oracle', dest='with_oracle', action='store_true', default=None)
    lemma.add_argument('--oracle-count', dest='oracle_count', type=int)
    lemma.add_argument('--seed', type=int)

    hull = subparsers.add_parser(Command.HULL_CHECK, parents=[common], help='ball against quadratic hull maxima')
    hull.add_argument('--ball')
    hull.add_argument('--n', type=float)
    hull.add_argument('--dim', type=int)
    hull.add_argument('--grid-step', dest='grid_step', type=float)
    hull.add_argument('--rules', type=int, help='number of random diagonal rules')
    hull.add_argument('--seed', type=int)
    _add_diag_args(hull)

    lower = subparsers.add_parser(Command.LOWER_BOUND, parents=[common], help='affinity and risk inequality values')
    lower.add_argument('--m', type=int)
    lower.add_argument('--n', type=float)
    lower.add_argument('--k', type=int)
    lower.add_argument('--c', type=float)

    detect = subparsers.add_parser(Command.DETECT, parents=[common], help='detection error rates and calibration')
    _add_estimator_args(detect)
    detect.add_argument('--n', type=float)
    detect.add_argument('--n-grid', dest='n_grid')
    detect.add_argument('--a', type=float, help='signal size; calibrate when omitted')
    detect.add_argument('--level', type=float, help='bound on the sum of the two error rates')
    detect.add_argument('--iterations', type=int)
    detect.add_argument('--exact-block-limit', dest='exact_block_limit', type=int)
    _add_sampling_args(detect)

    fit = subparsers.add_parser(Command.FIT, parents=[common], help='log-log slope of a (n, risk) CSV')
    fit.add_argument('--input')
    return parser

def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return ExitCode.OK if exc.code is None else int(exc.code)

    flags = vars(args)
    command = flags.pop('command')
    config_file = flags.pop('config_file')
    init_logger(log_level=flags.get('log_level') or 'INFO')
    try:
        file_config = config_util.get_config(config_file) if config_file else {}
        config = RunConfig.from_sources(command, file_config, flags)
        init_logger(log_level=config.log_level)
        config_util.validate_run_config(config)
    except (ValueError, TypeError, OSError, yaml.YAMLError) as exc:
        logger.error('Invalid configuration: %s', exc)
        return ExitCode.CONFIG_ERROR

    try:
        return COMMANDS[command](config)
    except ConfigError as exc:
        logger.error('Invalid configuration: %s', exc)
        return ExitCode.CONFIG_ERROR
    except (ValueError, OSError) as exc:
        logger.error('%s failed: %s', command, exc)
        return ExitCode.CONFIG_ERROR

def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == '__main__':
    main()
