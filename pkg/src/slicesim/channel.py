"""Indoor-hotspot radio abstraction: LOS draw, pathloss, SINR, truncated Shannon rate.

Links follow the 3GPP indoor open-office model. LOS probability is a piecewise
function of the horizontal distance, pathloss a log-distance fit per LOS state,
and lognormal shadowing is drawn once per link and held for the episode.
Rates come from a truncated Shannon map: zero below a SINR floor, an attenuated
log2(1 + SINR) in between, and a hard spectral-efficiency ceiling on top.

Transmit power is spread uniformly over the carrier, so per-RBG power is the
total minus 10*log10(n_rbg); a 16-RB group at 30 kHz subcarrier spacing spans
5.76 MHz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

RBS_PER_RBG = 16
SUBCARRIERS_PER_RB = 12
SUBCARRIER_SPACING_HZ = 30_000.0
RBG_BANDWIDTH_HZ = RBS_PER_RBG * SUBCARRIERS_PER_RB * SUBCARRIER_SPACING_HZ

MIN_LINK_DISTANCE_M = 0.5


@dataclass
class ChannelParams:
    fc_ghz: float = 4.0
    noise_figure_db: float = 7.0
    noise_density_dbm_hz: float = -174.0
    macro_tx_dbm: float = 31.0
    ap_tx_dbm: float = 10.0
    se_att: float = 1.0
    se_max: float = 17.65
    sinr_min_db: float = -10.0
    shadow_sigma_los_db: float = 3.0
    shadow_sigma_nlos_db: float = 8.03
    rbg_bandwidth_hz: float = RBG_BANDWIDTH_HZ


@dataclass
class LinkState:
    """Episode-static large-scale state of one link."""

    pathloss_db: float
    shadow_db: float
    los: bool

    @property
    def total_loss_db(self) -> float:
        return self.pathloss_db + self.shadow_db


def los_probability(d2d_m: float) -> float:
    """Indoor open-office LOS probability vs horizontal distance."""
    if d2d_m <= 5.0:
        return 1.0
    if d2d_m <= 49.0:
        return math.exp(-(d2d_m - 5.0) / 70.8)
    return 0.54 * math.exp(-(d2d_m - 49.0) / 211.7)


def pathloss_db(d3d_m: float, fc_ghz: float, los: bool) -> float:
    """Indoor-hotspot pathloss; NLOS is floored by the LOS curve."""
    d = max(d3d_m, MIN_LINK_DISTANCE_M)
    pl_los = 32.4 + 17.3 * math.log10(d) + 20.0 * math.log10(fc_ghz)
    if los:
        return pl_los
    pl_nlos = 17.30 + 38.3 * math.log10(d) + 24.9 * math.log10(fc_ghz)
    return max(pl_los, pl_nlos)


def draw_link(
    d2d_m: float,
    d3d_m: float,
    params: ChannelParams,
    rng: np.random.Generator,
) -> LinkState:
    """Sample the LOS state and shadowing for one link."""
    los = bool(rng.random() < los_probability(d2d_m))
    sigma = params.shadow_sigma_los_db if los else params.shadow_sigma_nlos_db
    shadow = float(rng.normal(0.0, sigma))
    return LinkState(
        pathloss_db=pathloss_db(d3d_m, params.fc_ghz, los),
        shadow_db=shadow,
        los=los,
    )


def noise_power_dbm(params: ChannelParams) -> float:
    """Thermal noise over one RBG including the receiver noise figure."""
    return (
        params.noise_density_dbm_hz
        + 10.0 * math.log10(params.rbg_bandwidth_hz)
        + params.noise_figure_db
    )


def per_rbg_tx_dbm(total_tx_dbm: float, n_rbg: int) -> float:
    """Flat power split of the carrier across n_rbg groups."""
    return total_tx_dbm - 10.0 * math.log10(n_rbg)


def sinr_db(
    link: LinkState,
    tx_dbm_per_rbg: float,
    interferers: list[tuple[LinkState, float]],
    params: ChannelParams,
) -> float:
    """Per-RBG SINR in dB.

    interferers: (link toward the victim receiver, tx dBm per RBG) pairs
    sharing the same RBG.
    """
    signal_dbm = tx_dbm_per_rbg - link.total_loss_db
    denom_mw = 10.0 ** (noise_power_dbm(params) / 10.0)
    for ilink, itx in interferers:
        denom_mw += 10.0 ** ((itx - ilink.total_loss_db) / 10.0)
    return signal_dbm - 10.0 * math.log10(denom_mw)


def spectral_efficiency(
    sinr_value_db: float, se_att: float, se_max: float, sinr_min_db: float
) -> float:
    """Truncated Shannon spectral efficiency in bit/s/Hz."""
    if sinr_value_db < sinr_min_db:
        return 0.0
    lin = 10.0 ** (sinr_value_db / 10.0)
    return min(se_att * math.log2(1.0 + lin), se_max)


def rbg_rate_bps(se: float, rbg_bandwidth_hz: float = RBG_BANDWIDTH_HZ) -> float:
    """Rate carried by one RBG at the given spectral efficiency."""
    return se * rbg_bandwidth_hz
