"""Outcome metrics: per-user satisfaction, Wilson intervals, empirical CDFs.

A user is satisfied when every QoS target it carries holds over the recorded
part of an episode. XR users must meet the rate floor, the loss ceiling, the
video/haptic sync budget, and the haptic queueing-delay target; eMBB users
only carry the rate floor.
"""

from __future__ import annotations

import math

from .reward import QosTargets


def wilson_interval(
    successes: int, n: int, z: float = 1.96
) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion, clamped to [0, 1].

    n == 0 returns the uninformative (0, 1).
    """
    if n == 0:
        return 0.0, 1.0
    if not 0 <= successes <= n:
        raise ValueError("successes outside [0, n]")
    phat = successes / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (phat + z2 / (2.0 * n)) / denom
    half = (z / denom) * math.sqrt(
        phat * (1.0 - phat) / n + z2 / (4.0 * n * n)
    )
    # |center - phat| <= half algebraically, so the interval always covers
    # the point estimate; guard the bounds against rounding anyway
    lo = min(max(0.0, center - half), phat)
    hi = max(min(1.0, center + half), phat)
    return lo, hi


def empirical_cdf(values) -> list[tuple[float, float]]:
    """(x, P(X <= x)) at each distinct sorted value; last probability is 1."""
    xs = sorted(values)
    n = len(xs)
    if n == 0:
        return []
    out: list[tuple[float, float]] = []
    for i, x in enumerate(xs):
        if i + 1 < n and xs[i + 1] == x:
            continue
        out.append((x, (i + 1) / n))
    return out


def xr_satisfied(
    mean_rate_bps: float,
    plr_value: float,
    sync_gap_ms: float,
    haptic_queue_delay_ms: float,
    targets: QosTargets,
) -> bool:
    """All four XR targets hold."""
    return (
        mean_rate_bps >= targets.xr_rate_target_bps
        and plr_value <= targets.plr_target
        and sync_gap_ms <= targets.sync_budget_ms
        and haptic_queue_delay_ms <= targets.haptic_delay_target_ms
    )


def embb_satisfied(mean_rate_bps: float, targets: QosTargets) -> bool:
    return mean_rate_bps >= targets.embb_rate_target_bps


def satisfaction_summary(rows: list[dict], z: float = 1.96) -> dict:
    """Pooled satisfaction ratio with a Wilson interval over record rows."""
    n = len(rows)
    successes = sum(1 for r in rows if r["satisfied"])
    lo, hi = wilson_interval(successes, n, z)
    return {
        "ratio": successes / n if n else 0.0,
        "wilson_lo": lo,
        "wilson_hi": hi,
        "n": n,
    }
