"""
Analytical ergodic capacities, eavesdropping capacities and the lower bound
on the ergodic secrecy sum rate.

Every ergodic rate is computed as (1/ln 2) * integral of S(x)/(1+x), where S
is the survival function of the relevant SINR. Closed forms are used where
the survival function is a sum of exponentials over linear factors:

* D1: S(x) = lambda_rr * e^(-s x) / (beta x + lambda_rr); partial fractions
  give lambda_rr/((lambda_rr - beta) ln 2) * [e^s E1(s) - e^z E1(z)] with
  z = lambda_rr * s / beta, i.e. exponents 1/c1 and 1/c2.
* Eve on D1: hypoexponential sum of Exp(pi_se) and Exp(pi_re).

D2 and the Eve-on-D2 upper bound have finite support [0, (1-a)/a) and are
integrated numerically. The Eve-on-D2 integrand is the survival function
of |h_se|^2 + |h_re|^2 (rates lambda_se, lambda_re) at w(x) = x/((1-a-ax) rho).
"""
import logging
import math
from dataclasses import dataclass

from django.conf import settings

from apps.numerics.services import (
    DENOMINATOR_FLOOR,
    quad_finite,
    quad_semi_infinite,
    scaled_exp_integral_e1,
)
from apps.system_model.services import SystemParams

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)

_MAX_DECADES = 12


def _rate(a: float, rho: float, var: float) -> float:
    """1 / (a * rho * var); infinite when the allocation is zero"""
    scale = a * rho * var
    return math.inf if scale == 0 else 1.0 / scale


@dataclass(frozen=True)
class RateParams:
    """Exponential rates of the SINR components"""

    pi_sr: float
    pi_rd1: float
    pi_se: float
    pi_re: float
    lambda_sr: float
    lambda_rd1: float
    lambda_rd2: float
    lambda_rr: float
    lambda_se: float
    lambda_re: float
    rho_si: float
    a_min: float

    @classmethod
    def from_params(cls, params: SystemParams) -> 'RateParams':
        profile = params.profile
        return cls(
            pi_sr=_rate(params.a_s, params.rho, profile.var_sr),
            pi_rd1=_rate(params.a_r, params.rho, profile.var_rd1),
            pi_se=_rate(params.a_s, params.rho, profile.var_se),
            pi_re=_rate(params.a_r, params.rho, profile.var_re),
            lambda_sr=1.0 / profile.var_sr,
            lambda_rd1=1.0 / profile.var_rd1,
            lambda_rd2=1.0 / profile.var_rd2,
            lambda_rr=1.0 / profile.var_si,
            lambda_se=1.0 / profile.var_se,
            lambda_re=1.0 / profile.var_re,
            rho_si=params.rho_si,
            a_min=min(params.a_s, params.a_r),
        )

    @property
    def s(self) -> float:
        return self.pi_sr + self.pi_rd1

    @property
    def beta(self) -> float:
        if self.rho_si == 0:
            return 0.0
        return self.rho_si * self.pi_sr

    @property
    def c1(self) -> float:
        return 0.0 if math.isinf(self.s) else 1.0 / self.s

    @property
    def c2(self) -> float:
        if math.isinf(self.s):
            return 0.0
        return self.beta / (self.lambda_rr * self.s)


@dataclass(frozen=True)
class AnalyticalReport:
    """Ergodic rates in bits/s/Hz for one configuration"""

    c_d1: float
    c_d2: float
    ce_d1: float
    ce_d2_ub: float
    sec_lb: float

    @property
    def sum_capacity(self) -> float:
        """Eve-free ergodic sum capacity"""
        return self.c_d1 + self.c_d2


def _degenerate(x: float, y: float, rel_tol: float = None) -> bool:
    rel_tol = rel_tol if rel_tol is not None else settings.DEGENERATE_REL_TOL
    return abs(x - y) < rel_tol * max(abs(x), abs(y))


def _support_limit(a: float) -> float:
    """SINRs of the form (1-a)g/(a g + n) stay below (1-a)/a"""
    return math.inf if a == 0 else (1.0 - a) / a


def _scaled_load(x: float, a: float, rho: float) -> float:
    """x / ((1 - a - a x) rho): channel gain needed to reach SINR x"""
    denominator = 1.0 - a - a * x
    if denominator <= 0:
        return math.inf
    return x / (max(denominator, DENOMINATOR_FLOOR) * rho)


def _decay_breakpoints(scale: float, support: float) -> list:
    """Decade ladder from scale/10 up to the support"""
    if not 0 < scale < math.inf:
        return []
    points = [scale * 10.0 ** k for k in range(-1, _MAX_DECADES)]
    return [x for x in points if x < support]


def _integrate_rate(survival, support: float, scale: float = math.inf) -> float:
    """
    (1/ln 2) * integral of survival(x)/(1+x) over [0, support).

    ``scale`` is the SINR at which the survival function starts to fall.
    At low SNR it is orders of magnitude below the support and the whole
    integral sits in a spike next to 0, so the interval is split in decades
    from there.
    """

    def integrand(x):
        return survival(x) / (1.0 + x)

    breakpoints = _decay_breakpoints(scale, support)
    if math.isinf(support):
        return quad_semi_infinite(integrand, breakpoints=breakpoints) / LN2
    return quad_finite(integrand, 0.0, support, breakpoints=breakpoints) / LN2


# -- strong user D1 --------------------------------------------------------

def survival_eff_d1(x: float, rp: RateParams) -> float:
    if x <= 0:
        return 1.0
    return rp.lambda_rr * math.exp(-rp.s * x) / (rp.beta * x + rp.lambda_rr)


def cdf_eff_d1(x: float, rp: RateParams) -> float:
    """P(gamma_D1 <= x)"""
    return 1.0 - survival_eff_d1(x, rp)


def ergodic_capacity_d1_quadrature(rp: RateParams) -> float:
    if math.isinf(rp.s):
        return 0.0
    return _integrate_rate(lambda x: survival_eff_d1(x, rp), math.inf, scale=1.0 / rp.s)


def ergodic_capacity_d1(rp: RateParams) -> float:
    """Closed-form ergodic capacity of D1"""
    if math.isinf(rp.s):
        return 0.0
    s, beta, lam = rp.s, rp.beta, rp.lambda_rr
    if beta == 0:
        return scaled_exp_integral_e1(s) / LN2
    if _degenerate(lam, beta):
        logger.debug('lambda_rr ~ beta (%r, %r): D1 capacity by quadrature', lam, beta)
        return ergodic_capacity_d1_quadrature(rp)
    return lam / ((lam - beta) * LN2) * (
        scaled_exp_integral_e1(s) - scaled_exp_integral_e1(lam * s / beta)
    )


# -- weak user D2 ----------------------------------------------------------

def survival_eff_d2(x: float, rp: RateParams, params: SystemParams) -> float:
    if x <= 0:
        return 1.0
    w_s = _scaled_load(x, params.a_s, params.rho)
    w_r = _scaled_load(x, params.a_r, params.rho)
    if math.isinf(w_s) or math.isinf(w_r):
        return 0.0
    exponent = rp.lambda_sr * w_s + (rp.lambda_rd1 + rp.lambda_rd2) * w_r
    return math.exp(-exponent) / (1.0 + rp.lambda_sr * params.rho_si * w_s / rp.lambda_rr)


def cdf_eff_d2(x: float, rp: RateParams, params: SystemParams) -> float:
    """P(gamma_D2 <= x); reaches 1 at min((1-a_s)/a_s, (1-a_r)/a_r)"""
    return 1.0 - survival_eff_d2(x, rp, params)


def ergodic_capacity_d2(rp: RateParams, params: SystemParams) -> float:
    support = min(_support_limit(params.a_s), _support_limit(params.a_r))
    # SINR where the survival exponent reaches 1 (small-x slope of the loads)
    slope = (
        rp.lambda_sr / ((1.0 - params.a_s) * params.rho)
        + (rp.lambda_rd1 + rp.lambda_rd2) / ((1.0 - params.a_r) * params.rho)
    )
    return _integrate_rate(lambda x: survival_eff_d2(x, rp, params), support, scale=1.0 / slope)


# -- eavesdropper ----------------------------------------------------------

def gamma_eve_capacity(pi: float) -> float:
    """Eve-on-D1 capacity when pi_se = pi_re = pi (Gamma(2, pi) SINR)"""
    return (1.0 + (1.0 - pi) * scaled_exp_integral_e1(pi)) / LN2


def _gamma_eve_capacity_quadrature(pi: float) -> float:
    # E[log2(1 + Y/pi)] with Y ~ Gamma(2, 1)
    return quad_semi_infinite(lambda y: y * math.exp(-y) * math.log1p(y / pi)) / LN2


def ergodic_eve_capacity_d1(rp: RateParams) -> float:
    pi_se, pi_re = rp.pi_se, rp.pi_re
    if math.isinf(pi_se) and math.isinf(pi_re):
        return 0.0
    if math.isinf(pi_se):
        return scaled_exp_integral_e1(pi_re) / LN2
    if math.isinf(pi_re):
        return scaled_exp_integral_e1(pi_se) / LN2
    if _degenerate(pi_se, pi_re):
        logger.debug('pi_se ~ pi_re (%r, %r): Gamma expectation by quadrature', pi_se, pi_re)
        return _gamma_eve_capacity_quadrature(0.5 * (pi_se + pi_re))
    return (
        pi_re * scaled_exp_integral_e1(pi_se) - pi_se * scaled_exp_integral_e1(pi_re)
    ) / ((pi_re - pi_se) * LN2)


def _eve_sum_survival(w: float, lambda_se: float, lambda_re: float) -> float:
    """P(|h_se|^2 + |h_re|^2 > w)"""
    if math.isinf(w):
        return 0.0
    if _degenerate(lambda_se, lambda_re):
        lam = 0.5 * (lambda_se + lambda_re)
        return (1.0 + lam * w) * math.exp(-lam * w)
    tail = (
        lambda_re * math.exp(-lambda_se * w) - lambda_se * math.exp(-lambda_re * w)
    ) / (lambda_re - lambda_se)
    return max(tail, 0.0)


def ergodic_eve_capacity_d2_ub(rp: RateParams, params: SystemParams) -> float:
    """Upper bound on Eve's D2 capacity, both allocations replaced by min(a_s, a_r)"""
    a = rp.a_min

    def survival(x):
        if x <= 0:
            return 1.0
        return _eve_sum_survival(_scaled_load(x, a, params.rho), rp.lambda_se, rp.lambda_re)

    scale = (1.0 - a) * params.rho / max(rp.lambda_se, rp.lambda_re)
    return _integrate_rate(survival, _support_limit(a), scale=scale)


# -- secrecy ---------------------------------------------------------------

def ergodic_secrecy_lower_bound(c_d1: float, c_d2: float, ce_d1: float, ce_d2_ub: float) -> AnalyticalReport:
    sec_lb = max(c_d1 - ce_d1, 0.0) + max(c_d2 - ce_d2_ub, 0.0)
    return AnalyticalReport(c_d1=c_d1, c_d2=c_d2, ce_d1=ce_d1, ce_d2_ub=ce_d2_ub, sec_lb=sec_lb)


def analyze(params: SystemParams) -> AnalyticalReport:
    """Evaluate every analytical ergodic quantity for one configuration"""
    rp = RateParams.from_params(params)
    return ergodic_secrecy_lower_bound(
        c_d1=ergodic_capacity_d1(rp),
        c_d2=ergodic_capacity_d2(rp, params),
        ce_d1=ergodic_eve_capacity_d1(rp),
        ce_d2_ub=ergodic_eve_capacity_d2_ub(rp, params),
    )


def ergodic_sum_capacity(params: SystemParams) -> float:
    rp = RateParams.from_params(params)
    return ergodic_capacity_d1(rp) + ergodic_capacity_d2(rp, params)
