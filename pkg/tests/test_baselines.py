"""Heuristic agent behavior."""

import numpy as np
import pytest

from slicesim.baselines import (
    ConstantActionAgent,
    DemandProportionalAgent,
    EqualSplitAgent,
    RandomAgent,
    demand_proportional_action,
)


class TestEqualSplit:
    def test_floor_of_half(self):
        assert EqualSplitAgent(17).act(np.zeros(8)) == 8
        assert EqualSplitAgent(16).act(np.zeros(8)) == 8

    def test_ignores_observation(self):
        agent = EqualSplitAgent(17)
        assert agent.act(np.ones(8)) == agent.act(np.zeros(8))


class TestDemandProportional:
    def test_equal_demands_round_half_up(self):
        assert demand_proportional_action(100.0, 100.0, 17) == 9

    def test_zero_xr_demand(self):
        assert demand_proportional_action(0.0, 100.0, 17) == 0

    def test_zero_embb_demand(self):
        assert demand_proportional_action(100.0, 0.0, 17) == 17

    def test_both_zero_falls_back_to_equal(self):
        assert demand_proportional_action(0.0, 0.0, 17) == 8

    def test_proportionality(self):
        # one third of demand -> round(17/3) = round(5.67) = 6
        assert demand_proportional_action(1.0, 2.0, 17) == 6

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            demand_proportional_action(-1.0, 5.0, 17)

    def test_agent_reads_occupancy_element(self):
        agent = DemandProportionalAgent(
            17, xr_occupancy_ref_bits=1000.0, embb_demand_bits=500.0
        )
        obs = np.zeros(8)
        obs[0] = 0.5  # 500 bits queued -> equal demands -> 9
        assert agent.act(obs) == 9
        obs[0] = 0.0
        assert agent.act(obs) == 0


class TestOtherAgents:
    def test_constant(self):
        assert ConstantActionAgent(5).act(np.zeros(8)) == 5

    def test_random_within_range_and_seeded(self):
        a = RandomAgent(18, np.random.default_rng(0))
        b = RandomAgent(18, np.random.default_rng(0))
        seq_a = [a.act(None) for _ in range(50)]
        seq_b = [b.act(None) for _ in range(50)]
        assert seq_a == seq_b
        assert all(0 <= x < 18 for x in seq_a)
