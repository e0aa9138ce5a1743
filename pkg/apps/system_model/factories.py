"""
Factories for system-model test fixtures
"""
import factory

from .services import FadingProfile, SystemParams, Topology


class TopologyFactory(factory.Factory):
    """Far-Eve baseline geometry of the simulation section"""

    class Meta:
        model = Topology

    d_sr = 10.0
    d_rd1 = 10.0
    d_rd2 = 15.0
    d_se = 40.0
    d_re = 30.0


class FadingProfileFactory(factory.Factory):
    class Meta:
        model = FadingProfile

    var_sr = 1e-3
    var_rd1 = 1e-3
    var_rd2 = 15.0 ** -3
    var_se = 40.0 ** -3
    var_re = 30.0 ** -3
    var_si = 1.0


class SystemParamsFactory(factory.Factory):
    """rho = 30 dB, rho_si = -10 dB, FPAPT allocation"""

    class Meta:
        model = SystemParams

    rho = 1000.0
    rho_si = 0.1
    nu = 3.0
    a_s = 0.2
    a_r = 0.2
    profile = factory.SubFactory(FadingProfileFactory)
