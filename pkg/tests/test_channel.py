"""Radio model oracles: LOS curve, pathloss, SINR combining, truncated Shannon."""

import math

import numpy as np
import pytest

from slicesim.channel import (
    RBG_BANDWIDTH_HZ,
    ChannelParams,
    LinkState,
    draw_link,
    los_probability,
    noise_power_dbm,
    pathloss_db,
    per_rbg_tx_dbm,
    rbg_rate_bps,
    sinr_db,
    spectral_efficiency,
)


class TestLosProbability:
    def test_close_range_certain(self):
        assert los_probability(0.0) == 1.0
        assert los_probability(5.0) == 1.0

    def test_mid_range(self):
        assert los_probability(49.0) == pytest.approx(
            math.exp(-44.0 / 70.8), abs=1e-12
        )
        assert los_probability(20.0) == pytest.approx(
            math.exp(-15.0 / 70.8), abs=1e-12
        )

    def test_far_range(self):
        assert los_probability(60.0) == pytest.approx(
            0.54 * math.exp(-11.0 / 211.7), abs=1e-12
        )

    def test_monotone_within_branches(self):
        # the curve steps up by ~0.003 at the 49 m branch point, so check
        # each branch separately
        for lo, hi in ((0.0, 49.0), (49.001, 200.0)):
            ds = np.linspace(lo, hi, 400)
            ps = [los_probability(d) for d in ds]
            assert all(a >= b - 1e-12 for a, b in zip(ps, ps[1:]))

    def test_monte_carlo_fraction(self):
        # empirical LOS fraction at 20 m within +-0.02 of the curve
        rng = np.random.default_rng(7)
        params = ChannelParams()
        n = 10_000
        hits = sum(
            draw_link(20.0, 20.0, params, rng).los for _ in range(n)
        )
        assert abs(hits / n - los_probability(20.0)) < 0.02


class TestPathloss:
    def test_los_5m_4ghz(self):
        assert pathloss_db(5.0, 4.0, los=True) == pytest.approx(56.53, abs=0.01)

    def test_los_reference_point(self):
        # 1 m at 1 GHz: both log terms vanish
        assert pathloss_db(1.0, 1.0, los=True) == pytest.approx(32.4, abs=1e-12)

    def test_nlos_floored_by_los(self):
        # at short range the NLOS fit dips below the LOS curve and is floored
        assert pathloss_db(1.0, 1.0, los=False) == pytest.approx(32.4, abs=1e-12)

    def test_nlos_dominates_far(self):
        far_nlos = pathloss_db(30.0, 4.0, los=False)
        expected = 17.30 + 38.3 * math.log10(30.0) + 24.9 * math.log10(4.0)
        assert far_nlos == pytest.approx(expected, abs=1e-9)
        assert far_nlos > pathloss_db(30.0, 4.0, los=True)

    def test_distance_clamp(self):
        assert pathloss_db(0.1, 4.0, True) == pathloss_db(0.5, 4.0, True)
        assert pathloss_db(0.3, 4.0, False) == pathloss_db(0.5, 4.0, False)


def _flat_params(noise_dbm: float) -> ChannelParams:
    """Params whose total RBG noise power equals noise_dbm exactly."""
    return ChannelParams(
        noise_density_dbm_hz=noise_dbm,
        rbg_bandwidth_hz=1.0,
        noise_figure_db=0.0,
    )


class TestSinr:
    def test_noise_only(self):
        link = LinkState(pathloss_db=0.0, shadow_db=0.0, los=True)
        assert sinr_db(link, 0.0, [], _flat_params(-90.0)) == pytest.approx(
            90.0, abs=1e-9
        )

    def test_interferer_at_noise_power_costs_3db(self):
        link = LinkState(0.0, 0.0, True)
        ilink = LinkState(0.0, 0.0, True)
        got = sinr_db(link, 0.0, [(ilink, -90.0)], _flat_params(-90.0))
        assert got == pytest.approx(90.0 - 10.0 * math.log10(2.0), abs=1e-9)

    def test_example_with_interference(self):
        # signal -80 dBm, noise -90 dBm, interference -90 dBm -> ~6.99 dB
        link = LinkState(80.0, 0.0, True)
        ilink = LinkState(90.0, 0.0, True)
        got = sinr_db(link, 0.0, [(ilink, 0.0)], _flat_params(-90.0))
        assert got == pytest.approx(6.9897, abs=1e-3)

    def test_shadow_enters_budget(self):
        base = LinkState(80.0, 0.0, True)
        shadowed = LinkState(80.0, 5.0, True)
        p = _flat_params(-90.0)
        assert sinr_db(shadowed, 0.0, [], p) == pytest.approx(
            sinr_db(base, 0.0, [], p) - 5.0, abs=1e-12
        )


class TestSpectralEfficiency:
    def test_attenuated_shannon(self):
        assert spectral_efficiency(20.0, 0.6, 7.8, -10.0) == pytest.approx(
            0.6 * math.log2(101.0), abs=1e-9
        )

    def test_ceiling(self):
        assert spectral_efficiency(60.0, 0.6, 7.8, -10.0) == 7.8

    def test_outage_below_floor(self):
        assert spectral_efficiency(-10.01, 0.6, 7.8, -10.0) == 0.0

    def test_at_floor_still_transmits(self):
        assert spectral_efficiency(-10.0, 0.6, 7.8, -10.0) == pytest.approx(
            0.6 * math.log2(1.1), abs=1e-12
        )


class TestRates:
    def test_rbg_bandwidth(self):
        assert RBG_BANDWIDTH_HZ == 16 * 12 * 30_000

    def test_rate_examples(self):
        assert rbg_rate_bps(4.0, 5.76e6) == pytest.approx(23.04e6, abs=1e-3)
        assert rbg_rate_bps(7.8, 5.76e6) == pytest.approx(44.928e6, abs=1e-3)

    def test_per_rbg_power_split(self):
        assert per_rbg_tx_dbm(31.0, 17) == pytest.approx(
            31.0 - 10.0 * math.log10(17.0), abs=1e-12
        )

    def test_default_noise_power(self):
        got = noise_power_dbm(ChannelParams())
        expected = -174.0 + 10.0 * math.log10(5.76e6) + 7.0
        assert got == pytest.approx(expected, abs=1e-12)


class TestDrawLink:
    def test_always_los_at_zero_distance(self):
        rng = np.random.default_rng(3)
        params = ChannelParams()
        links = [draw_link(0.0, 0.3, params, rng) for _ in range(200)]
        assert all(l.los for l in links)

    def test_los_shadow_sigma(self):
        rng = np.random.default_rng(11)
        params = ChannelParams()
        shadows = [
            draw_link(0.0, 0.3, params, rng).shadow_db for _ in range(10_000)
        ]
        assert 2.85 < np.std(shadows) < 3.15

    def test_total_loss_combines(self):
        link = LinkState(pathloss_db=50.0, shadow_db=-2.0, los=True)
        assert link.total_loss_db == 48.0
