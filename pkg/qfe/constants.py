class Command:
    RISK = 'risk'
    SWEEP = 'sweep'
    RATES = 'rates'
    LEMMA_CHECK = 'lemma-check'
    HULL_CHECK = 'hull-check'
    LOWER_BOUND = 'lower-bound'
    DETECT = 'detect'
    FIT = 'fit'

    ALL = (RISK, SWEEP, RATES, LEMMA_CHECK, HULL_CHECK, LOWER_BOUND, DETECT, FIT)

class ExitCode:
    OK = 0
    AUDIT_FAILURE = 1
    CONFIG_ERROR = 2

class Columns:
    SWEEP = ['n', 'risk', 'bias', 'variance', 'theta_id']
    RATES = ['alpha', 'r_star', 'r_q_star']
    LEMMA_CHECK = [
        'tau', 'root_n_theta', 'n',
        'mu0', 'bound_mu0', 'bias', 'bound_bias', 'variance', 'bound_var',
        'holds',
    ]
    HULL_CHECK = ['rule', 'sup_ball', 'sup_hull', 'sup_vertices', 'tolerance', 'holds']
    DETECT_RATES = ['n', 'a', 'type1', 'max_type2', 'sum']
    DETECT_CALIBRATION = ['n', 'a', 'lower', 'type1', 'max_type2', 'sum', 'iterations']


# closed form and quadrature must agree to this relative precision
ORACLE_RTOL = 1e-9
