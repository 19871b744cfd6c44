from __future__ import annotations

from dataclasses import dataclass
import itertools
import math

from gsm.analytics.gaussian import SQRT_2PI
from gsm.analytics.moments import ThresholdKind, centering_constant, soft_moments
from gsm.model.coefficients import NoiseLevel

# additive slack for floating point ties; the bias bound is attained at theta = 0
BOUND_SLACK = 1e-12

AUDIT_TAUS = (1.0, 2.0, 4.0, 8.0, 16.0)
AUDIT_ROOT_N_THETAS = tuple(round(0.1 * step, 10) for step in range(51))
AUDIT_NS = (1.0, 1e2, 1e4)


@dataclass(frozen=True)
class Lemma1Report:
    mu0: float
    bias: float
    variance: float
    bound_mu0: float
    bound_bias: float
    bound_var: float

    @property
    def mu0_holds(self) -> bool:
        return abs(self.mu0) <= self.bound_mu0 + BOUND_SLACK

    @property
    def bias_holds(self) -> bool:
        return abs(self.bias) <= self.bound_bias + BOUND_SLACK

    @property
    def variance_holds(self) -> bool:
        return self.variance <= self.bound_var + BOUND_SLACK

    @property
    def all_bounds_hold(self) -> bool:
        return self.mu0_holds and self.bias_holds and self.variance_holds


@dataclass(frozen=True)
class AuditPoint:
    tau: float
    root_n_theta: float
    n: float
    report: Lemma1Report


def lemma1_check(theta: float, n: NoiseLevel | float, tau: float) -> Lemma1Report:
    """Exact bias/variance of ``(X**2 - tau/n)_+ - mu0`` against its three analytic bounds"""
    if not tau >= 1:
        raise ValueError(f'The thresholding bounds need tau >= 1, got {tau}')
    noise = n if isinstance(n, NoiseLevel) else NoiseLevel(float(n))
    mu0 = centering_constant(noise, tau, ThresholdKind.SOFT)
    moments = soft_moments(theta, noise, tau / noise.n)
    bias = moments.m1 - mu0 - theta * theta
    bound_mu0 = 4.0 / (SQRT_2PI * noise.n * math.sqrt(tau) * math.exp(tau / 2.0))
    bound_bias = min(2.0 * tau / noise.n, theta * theta)
    bound_var = 6.0 * theta * theta / noise.n + (4.0 * math.sqrt(tau) + 18.0) / (noise.n ** 2 * math.exp(tau / 2.0))
    return Lemma1Report(
        mu0=mu0,
        bias=bias,
        variance=moments.variance,
        bound_mu0=bound_mu0,
        bound_bias=bound_bias,
        bound_var=bound_var,
    )

def lemma1_audit(
    taus=AUDIT_TAUS,
    root_n_thetas=AUDIT_ROOT_N_THETAS,
    ns=AUDIT_NS,
) -> list[AuditPoint]:
    """Evaluate the bounds on a grid of ``(tau, sqrt(n) * theta, n)``; theta is recovered per n"""
    points = []
    for tau, root_n_theta, n in itertools.product(taus, root_n_thetas, ns):
        theta = root_n_theta / math.sqrt(n)
        points.append(AuditPoint(tau, root_n_theta, n, lemma1_check(theta, n, tau)))
    return points
