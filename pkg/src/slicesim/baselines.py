"""Heuristic slice controllers used as comparison points for the learned agent.

All agents expose act(obs, greedy) -> action, where the action is the number
of RBGs granted to the XR slice. The `sac-base` baseline is not here: it is
the same learner as `sac`, trained on the sync- and haptic-blind stand-in
reward (see reward.RewardBreakdown.base_total).
"""

from __future__ import annotations

import math

import numpy as np


class EqualSplitAgent:
    """Always hands floor(R / 2) RBGs to the XR slice."""

    name = "equal"

    def __init__(self, n_rbg_total: int):
        self.action = n_rbg_total // 2

    def act(self, obs, greedy: bool = False) -> int:
        return self.action


def demand_proportional_action(
    xr_demand_bits: float, embb_demand_bits: float, n_rbg_total: int
) -> int:
    """RBGs for XR proportional to its share of queued demand, round half up.

    Both demands zero falls back to the equal split.
    """
    if xr_demand_bits < 0 or embb_demand_bits < 0:
        raise ValueError("negative demand")
    total = xr_demand_bits + embb_demand_bits
    if total <= 0:
        return n_rbg_total // 2
    share = xr_demand_bits / total
    return min(n_rbg_total, math.floor(n_rbg_total * share + 0.5))


class DemandProportionalAgent:
    """Splits RBGs by instantaneous queued-demand share.

    XR demand is read off the occupancy element of the observation (scaled
    back to bits); eMBB demand is the fixed full-buffer refill level times
    the number of eMBB users.
    """

    name = "demand"

    def __init__(
        self,
        n_rbg_total: int,
        xr_occupancy_ref_bits: float,
        embb_demand_bits: float,
    ):
        self.n_rbg_total = n_rbg_total
        self.xr_occupancy_ref_bits = xr_occupancy_ref_bits
        self.embb_demand_bits = embb_demand_bits

    def act(self, obs, greedy: bool = False) -> int:
        xr_bits = float(obs[0]) * self.xr_occupancy_ref_bits
        return demand_proportional_action(
            xr_bits, self.embb_demand_bits, self.n_rbg_total
        )


class ConstantActionAgent:
    """Plays one fixed action; handy for landscape probes and tests."""

    name = "constant"

    def __init__(self, action: int):
        self.action = action

    def act(self, obs, greedy: bool = False) -> int:
        return self.action


class RandomAgent:
    """Uniform random actions; exercises the simulator in tests."""

    name = "random"

    def __init__(self, n_actions: int, rng: np.random.Generator):
        self.n_actions = n_actions
        self.rng = rng

    def act(self, obs, greedy: bool = False) -> int:
        return int(self.rng.integers(self.n_actions))
