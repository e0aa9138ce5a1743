"""
System model for the FD-NOMA relay V2V link: geometry, fading statistics
and the parameter record shared by every other app.

Noise power is normalized to 1, so only the transmit SNR ``rho`` and the
residual self-interference SNR ``rho_si`` appear; the residual-SI level is
``rho_si / rho``.
"""
import math
from dataclasses import asdict, dataclass, replace

from .exceptions import InvalidConfigurationError
from .serializers import SystemParamsSerializer, TopologySerializer

# Baseline geometry of the simulation section (meters) and pathloss exponent
DEFAULT_NU = 3.0
DEFAULT_D_SR = 10.0
DEFAULT_D_RD1 = 10.0
DEFAULT_D_RD2 = 15.0
DEFAULT_VAR_SI = 1.0

# Fixed power allocation used as the FPAPT baseline
FPAPT_ALLOCATION = 0.2


@dataclass(frozen=True)
class Topology:
    """Distances in meters between source S, relay R, users D1/D2 and Eve E"""

    d_sr: float
    d_rd1: float
    d_rd2: float
    d_se: float
    d_re: float


@dataclass(frozen=True)
class FadingProfile:
    """Mean channel power gain of each link (Rayleigh, so |h|^2 is exponential)"""

    var_sr: float
    var_rd1: float
    var_rd2: float
    var_se: float
    var_re: float
    var_si: float = DEFAULT_VAR_SI


@dataclass(frozen=True)
class SystemParams:
    """Linear SNRs, pathloss exponent, power-allocation pair and fading profile"""

    rho: float
    rho_si: float
    nu: float
    a_s: float
    a_r: float
    profile: FadingProfile

    @property
    def k_r(self) -> float:
        """Residual self-interference level relative to transmit power"""
        return self.rho_si / self.rho

    def with_allocation(self, a_s: float, a_r: float) -> 'SystemParams':
        return replace(self, a_s=a_s, a_r=a_r)


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def variances_from_topology(topology: Topology, nu: float, var_si: float = DEFAULT_VAR_SI) -> FadingProfile:
    """
    Convert link distances into channel variances sigma^2 = d^(-nu).

    Args:
        topology: Link distances in meters
        nu: Pathloss exponent
        var_si: Self-interference channel variance, passed through

    Returns:
        FadingProfile with one variance per link

    Raises:
        InvalidConfigurationError: non-positive distance, nu or var_si
    """
    serializer = TopologySerializer(data=asdict(topology))
    errors = {} if serializer.is_valid() else dict(serializer.errors)
    if not nu > 0:
        errors['nu'] = ['Pathloss exponent must be positive.']
    if not var_si > 0:
        errors['var_si'] = ['Channel variance must be positive.']
    if errors:
        raise InvalidConfigurationError(errors)

    return FadingProfile(
        var_sr=topology.d_sr ** -nu,
        var_rd1=topology.d_rd1 ** -nu,
        var_rd2=topology.d_rd2 ** -nu,
        var_se=topology.d_se ** -nu,
        var_re=topology.d_re ** -nu,
        var_si=var_si,
    )


def _flatten_errors(errors, prefix=''):
    flat = {}
    for field, messages in errors.items():
        name = f'{prefix}{field}'
        if isinstance(messages, dict):
            flat.update(_flatten_errors(messages, prefix=f'{name}.'))
        else:
            flat[name] = messages
    return flat


def validate_params(params: SystemParams) -> SystemParams:
    """
    Check every SystemParams invariant.

    Returns the same record when valid; otherwise raises
    InvalidConfigurationError naming each offending field
    (nested profile fields are reported as ``profile.<field>``).
    """
    serializer = SystemParamsSerializer(data=asdict(params))
    if not serializer.is_valid():
        raise InvalidConfigurationError(_flatten_errors(serializer.errors))
    return params


def build_params(
    rho_db: float,
    rho_si_db: float,
    topology: Topology,
    a_s: float = FPAPT_ALLOCATION,
    a_r: float = FPAPT_ALLOCATION,
    nu: float = DEFAULT_NU,
    var_si: float = DEFAULT_VAR_SI,
) -> SystemParams:
    """Build a validated SystemParams from dB SNRs and a geometry"""
    profile = variances_from_topology(topology, nu, var_si)
    params = SystemParams(
        rho=db_to_linear(rho_db),
        rho_si=db_to_linear(rho_si_db),
        nu=nu,
        a_s=a_s,
        a_r=a_r,
        profile=profile,
    )
    return validate_params(params)
