from qfe.risklab.audits import mixture_average_risk, variance_audit, variance_bound_53
from qfe.risklab.exact import BlockContribution, RiskReport, exact_risk, truncation_bias_bound
from qfe.risklab.hull import HullCheck, hull_sup_equality
from qfe.risklab.monte_carlo import mc_risk, simulate_estimates
from qfe.risklab.rates import RateFit, rate_fit, table1_exponents
from qfe.risklab.sweep import sweep, worst_case_member, worst_case_risk

__all__ = [
    'mixture_average_risk',
    'variance_audit',
    'variance_bound_53',
    'BlockContribution',
    'RiskReport',
    'exact_risk',
    'truncation_bias_bound',
    'HullCheck',
    'hull_sup_equality',
    'mc_risk',
    'simulate_estimates',
    'RateFit',
    'rate_fit',
    'table1_exponents',
    'sweep',
    'worst_case_member',
    'worst_case_risk',
]
