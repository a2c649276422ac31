"""QoS-violation reward: zero while targets hold, negative linear penalties otherwise.

Per-TTI slice statistics map to five penalty terms:

* rate (one per slice): shortfall of the mean user rate below its target,
  normalized by the target, so an idle slice scores -1.
* loss: XR packet-loss ratio excess over its target, normalized by the
  remaining headroom to 1.
* sync: excess of the video/haptic delivery-latency gap over the sync budget,
  normalized by the budget (unbounded below by design).
* haptic latency: excess of the queued-haptic mean age over its target,
  normalized by the drop-ceiling headroom.

The total is the plain sum. Learners see the total clamped to [-10, 0]; logs
keep the raw value. A sync/haptic-blind variant (rate terms + loss only)
serves as the stand-in training signal for the `sac-base` baseline.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class QosTargets:
    xr_rate_target_bps: float = 60e6
    embb_rate_target_bps: float = 45e6
    plr_target: float = 1e-5
    sync_budget_ms: float = 50.0
    haptic_delay_target_ms: float = 10.0
    tau_max_ms: float = 200.0


@dataclass
class RewardBreakdown:
    rate_xr: float
    rate_embb: float
    loss: float
    sync: float
    haptic: float

    @property
    def total(self) -> float:
        return self.loss + self.sync + self.haptic + self.rate_xr + self.rate_embb

    @property
    def base_total(self) -> float:
        """Sync- and haptic-blind variant used by the stand-in baseline."""
        return self.loss + self.rate_xr + self.rate_embb


def rate_reward(rate_bps: float, target_bps: float) -> float:
    """0 at or above target, else -(shortfall / target); -1 at zero rate."""
    if rate_bps >= target_bps:
        return 0.0
    return -(target_bps - rate_bps) / target_bps


def loss_reward(plr_value: float, plr_target: float) -> float:
    """0 at or below target, else -(excess / (1 - target))."""
    if plr_value <= plr_target:
        return 0.0
    return -(plr_value - plr_target) / (1.0 - plr_target)


def sync_reward(tau_v_ms: float, tau_h_ms: float, sync_budget_ms: float) -> float:
    """0 while |video - haptic| latency gap is within budget, else linear."""
    gap = abs(tau_v_ms - tau_h_ms)
    if gap <= sync_budget_ms:
        return 0.0
    return -(gap - sync_budget_ms) / sync_budget_ms


def haptic_latency_reward(
    tau_hat_ms: float, target_ms: float, tau_max_ms: float
) -> float:
    """0 while queued-haptic mean age is within target, else linear to -1."""
    if tau_hat_ms <= target_ms:
        return 0.0
    return -(tau_hat_ms - target_ms) / (tau_max_ms - target_ms)


def total_reward(
    xr_rate_bps: float,
    embb_rate_bps: float,
    plr_value: float,
    tau_v_ms: float,
    tau_h_ms: float,
    tau_hat_ms: float,
    targets: QosTargets,
) -> RewardBreakdown:
    """All components from one TTI's slice statistics."""
    return RewardBreakdown(
        rate_xr=rate_reward(xr_rate_bps, targets.xr_rate_target_bps),
        rate_embb=rate_reward(embb_rate_bps, targets.embb_rate_target_bps),
        loss=loss_reward(plr_value, targets.plr_target),
        sync=sync_reward(tau_v_ms, tau_h_ms, targets.sync_budget_ms),
        haptic=haptic_latency_reward(
            tau_hat_ms, targets.haptic_delay_target_ms, targets.tau_max_ms
        ),
    )


def clamp_reward(value: float, lo: float = -10.0, hi: float = 0.0) -> float:
    """Clamp the learner-visible reward; raw values stay in logs."""
    return min(hi, max(lo, value))
