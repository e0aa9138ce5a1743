"""
Instantaneous SINRs, rates and secrecy rates of the FD-NOMA relay link.

Decoding order: the relay decodes D2's symbol first (treating D1's as
noise), then D1's after SIC; D1 decodes D2's symbol before its own; D2
decodes its own directly. Eve combines the source and relay copies (MRC)
and decodes with the same NOMA order.

The eavesdropper SINR for D1 is ``a_s*rho*g_se + a_r*rho*g_re`` without an
additive 1; only that form has the hypoexponential density the
eavesdropping-capacity closed form relies on.

All functions accept scalars or the array-backed ChannelBatch.
"""
from dataclasses import dataclass
from typing import Any

import numpy as np

from apps.system_model.services import SystemParams


@dataclass(frozen=True)
class SinrSet:
    """SINR gamma^j_i for receiver j decoding user i's symbol, plus effective SINRs"""

    g_r_d1: Any
    g_r_d2: Any
    g_d1_d1: Any
    g_d1_d2: Any
    g_d2_d2: Any
    g_e_d1: Any
    g_e_d2: Any
    eff_d1: Any
    eff_d2: Any


@dataclass(frozen=True)
class RateSet:
    """Rates in bits/s/Hz"""

    r_d1: Any
    r_d2: Any
    re_d1: Any
    re_d2: Any
    s_d1: Any
    s_d2: Any
    s_sum: Any


def compute_sinrs(params: SystemParams, ch) -> SinrSet:
    rho, rho_si = params.rho, params.rho_si
    a_s, a_r = params.a_s, params.a_r

    source_relay = rho * ch.g_sr
    relay_noise = rho_si * ch.g_si + 1.0
    g_r_d2 = (1.0 - a_s) * source_relay / (a_s * source_relay + relay_noise)
    g_r_d1 = a_s * source_relay / relay_noise

    relay_d1 = rho * ch.g_rd1
    relay_d2 = rho * ch.g_rd2
    g_d1_d2 = (1.0 - a_r) * relay_d1 / (a_r * relay_d1 + 1.0)
    g_d1_d1 = a_r * relay_d1
    g_d2_d2 = (1.0 - a_r) * relay_d2 / (a_r * relay_d2 + 1.0)

    source_eve = rho * ch.g_se
    relay_eve = rho * ch.g_re
    g_e_d2 = ((1.0 - a_s) * source_eve + (1.0 - a_r) * relay_eve) / (
        a_s * source_eve + a_r * relay_eve + 1.0
    )
    g_e_d1 = a_s * source_eve + a_r * relay_eve

    return SinrSet(
        g_r_d1=g_r_d1,
        g_r_d2=g_r_d2,
        g_d1_d1=g_d1_d1,
        g_d1_d2=g_d1_d2,
        g_d2_d2=g_d2_d2,
        g_e_d1=g_e_d1,
        g_e_d2=g_e_d2,
        eff_d1=np.minimum(g_r_d1, g_d1_d1),
        eff_d2=np.minimum(np.minimum(g_r_d2, g_d2_d2), g_d1_d2),
    )


def instantaneous_rates(sinrs: SinrSet) -> RateSet:
    r_d1 = np.log2(1.0 + sinrs.eff_d1)
    r_d2 = np.log2(1.0 + sinrs.eff_d2)
    re_d1 = np.log2(1.0 + sinrs.g_e_d1)
    re_d2 = np.log2(1.0 + sinrs.g_e_d2)
    s_d1 = np.maximum(r_d1 - re_d1, 0.0)
    s_d2 = np.maximum(r_d2 - re_d2, 0.0)
    return RateSet(
        r_d1=r_d1,
        r_d2=r_d2,
        re_d1=re_d1,
        re_d2=re_d2,
        s_d1=s_d1,
        s_d2=s_d2,
        s_sum=s_d1 + s_d2,
    )


def instantaneous_secrecy(params: SystemParams, ch) -> RateSet:
    """Per-realization secrecy rates, clipped per user then summed"""
    return instantaneous_rates(compute_sinrs(params, ch))
