"""
Test configuration and fixtures
"""
import pytest

from apps.fading.services import ChannelRealization
from apps.system_model.factories import SystemParamsFactory, TopologyFactory
from apps.system_model.services import build_params


@pytest.fixture
def worked_params():
    """rho = 10, rho_si = 1, a_s = 0.2, a_r = 0.25"""
    return SystemParamsFactory(rho=10.0, rho_si=1.0, a_s=0.2, a_r=0.25)


@pytest.fixture
def worked_realization():
    """Hand-checked realization whose effective SINRs are both 1"""
    return ChannelRealization(g_sr=1.0, g_rd1=0.5, g_rd2=0.2, g_se=0.1, g_re=0.1, g_si=1.0)


@pytest.fixture
def fig2_params():
    """Builder for the high-SNR allocation-sweep configuration (far Eve, 40/30 m)"""

    def make(a_s=0.2, a_r=0.14, rho_db=30.0, rho_si_db=-10.0, **topology):
        return build_params(rho_db, rho_si_db, TopologyFactory(**topology), a_s=a_s, a_r=a_r)

    return make
