from gsm.bounds.affinity import (
    AFFINITY_CEILING,
    affinity_bound,
    chi_square_affinity,
    cri_lower_bound,
    hypergeometric_log_pmf,
    mixture_cri_bound,
    mixture_risk_floor,
)
from gsm.bounds.exponents import information_bound, minimax_lower_exponent, quadratic_exponent, smoothness
from gsm.bounds.mixture import MixtureSpec, sample_mixture, theta_km_vertex

__all__ = [
    'AFFINITY_CEILING',
    'affinity_bound',
    'chi_square_affinity',
    'cri_lower_bound',
    'hypergeometric_log_pmf',
    'mixture_cri_bound',
    'mixture_risk_floor',
    'information_bound',
    'minimax_lower_exponent',
    'quadratic_exponent',
    'smoothness',
    'MixtureSpec',
    'sample_mixture',
    'theta_km_vertex',
]
