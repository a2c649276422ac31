"""Per-TTI downlink simulator: two slices, one controller action, QoS reward.

Each episode draws a fresh deployment and episode-static link states, then
steps TTI by TTI. A step, in order:

1. traffic arrivals (XR video + haptic packets; eMBB full-buffer refill)
2. inter-slice split of the RBG pool from the controller action
3. buffer-proportional intra-slice RBG counts per user
4. per-user allocated rate = RBG count x per-RBG link rate
5. expiry of packets older than the delay ceiling (end-of-TTI clock, so a
   delivered packet's latency can never exceed the ceiling)
6. FIFO drain within the TTI's bit budget, haptic queue first
7. sliding-window slice statistics
8. reward components from those statistics
9. next observation (8 values, each clipped to [0, 1])

Observations, in order: XR queue occupancy, video delivery latency, haptic
delivery latency, video/haptic latency gap, XR loss ratio, XR rate vs target,
eMBB rate vs target, fraction of eMBB users under target.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .channel import (
    LinkState,
    draw_link,
    per_rbg_tx_dbm,
    rbg_rate_bps,
    sinr_db,
    spectral_efficiency,
)
from .config import EnvParams
from .deployment import Layout, distance2d, distance3d, sample_layout
from .metrics import embb_satisfied, xr_satisfied
from .reward import RewardBreakdown, clamp_reward, total_reward
from .scheduling import allocate_counts, inter_slice_split
from .traffic import EmbbBuffer, FlowBuffer, PeriodicSource, plr

OBS_DIM = 8


@dataclass
class StepOutcome:
    obs: np.ndarray
    reward: float                 # clamped full reward (learner signal)
    base_reward: float            # clamped sync/haptic-blind stand-in reward
    breakdown: RewardBreakdown    # raw per-component values
    done: bool
    info: dict = field(default_factory=dict)


class _XrUser:
    __slots__ = (
        "video_src",
        "haptic_src",
        "video_buf",
        "haptic_buf",
        "rbg_rate",
        "rate_sum",
        "lat_v_sum",
        "lat_v_count",
        "lat_h_sum",
        "lat_h_count",
        "dropped",
        "delivered",
        "hap_age_sum",
    )

    def __init__(self, video_src, haptic_src, rbg_rate):
        self.video_src = video_src
        self.haptic_src = haptic_src
        self.video_buf = FlowBuffer()
        self.haptic_buf = FlowBuffer()
        self.rbg_rate = rbg_rate
        self.rate_sum = 0.0
        self.lat_v_sum = 0.0
        self.lat_v_count = 0
        self.lat_h_sum = 0.0
        self.lat_h_count = 0
        self.dropped = 0
        self.delivered = 0
        self.hap_age_sum = 0.0


class SliceEnv:
    """Downlink RBG-slicing environment for one user density."""

    def __init__(self, params: EnvParams, n_bodies: int):
        self.p = params
        self.n_bodies = n_bodies
        self.n_actions = params.n_rbg + 1
        self.obs_dim = OBS_DIM
        per_user_bits_per_ms = (
            params.traffic.video_fps * params.traffic.frame_bits
            + params.traffic.haptic_pps * params.traffic.haptic_bits
        ) / 1000.0
        # occupancy scale: load that can pile up before the age ceiling clears it
        self.occ_ref_bits = (
            n_bodies * per_user_bits_per_ms * params.traffic.tau_max_ms
        )
        self.embb_demand_bits = params.n_embb * params.traffic.embb_refill_bits
        self.layout: Layout | None = None
        self.t = 0

    # ---- episode setup ----

    def _link_rates(self, rng: np.random.Generator) -> None:
        """Draw episode-static links and per-RBG rates for every user."""
        p = self.p
        lay = self.layout
        ap_tx = per_rbg_tx_dbm(p.chan.ap_tx_dbm, p.n_rbg)
        macro_tx = per_rbg_tx_dbm(p.chan.macro_tx_dbm, p.n_rbg)

        self.xr_links: list[LinkState] = []
        for i in range(self.n_bodies):
            d2 = distance2d(lay.ap_pos[i], lay.device_pos[i])
            d3 = distance3d(lay.ap_pos[i], lay.device_pos[i])
            self.xr_links.append(draw_link(d2, d3, p.chan, rng))

        cross: list[list] = []
        if p.reuse_mode == "xr_full_reuse":
            # interference links AP_j -> device_i, drawn per episode
            for i in range(self.n_bodies):
                row = []
                for j in range(self.n_bodies):
                    if j == i:
                        row.append(None)
                        continue
                    d2 = distance2d(lay.ap_pos[j], lay.device_pos[i])
                    d3 = distance3d(lay.ap_pos[j], lay.device_pos[i])
                    row.append(draw_link(d2, d3, p.chan, rng))
                cross.append(row)

        self.embb_links: list[LinkState] = []
        for j in range(p.n_embb):
            d2 = distance2d(lay.macro_pos, lay.embb_pos[j])
            d3 = distance3d(lay.macro_pos, lay.embb_pos[j])
            self.embb_links.append(draw_link(d2, d3, p.chan, rng))

        self.xr_rbg_rate = []
        for i, link in enumerate(self.xr_links):
            if p.reuse_mode == "xr_full_reuse":
                interferers = [
                    (cross[i][j], ap_tx)
                    for j in range(self.n_bodies)
                    if j != i
                ]
            else:
                interferers = []
            s = sinr_db(link, ap_tx, interferers, p.chan)
            se = spectral_efficiency(
                s, p.chan.se_att, p.chan.se_max, p.chan.sinr_min_db
            )
            self.xr_rbg_rate.append(rbg_rate_bps(se, p.chan.rbg_bandwidth_hz))

        self.embb_rbg_rate = []
        for link in self.embb_links:
            s = sinr_db(link, macro_tx, [], p.chan)
            se = spectral_efficiency(
                s, p.chan.se_att, p.chan.se_max, p.chan.sinr_min_db
            )
            self.embb_rbg_rate.append(rbg_rate_bps(se, p.chan.rbg_bandwidth_hz))

    def reset(self, rng: np.random.Generator) -> np.ndarray:
        p = self.p
        self.layout = sample_layout(self.n_bodies, p.n_embb, p.deploy, rng)
        self._link_rates(rng)
        self.users = [
            _XrUser(
                PeriodicSource(p.traffic.video_fps, p.traffic.frame_bits, rng),
                PeriodicSource(p.traffic.haptic_pps, p.traffic.haptic_bits, rng),
                self.xr_rbg_rate[i],
            )
            for i in range(self.n_bodies)
        ]
        self.embb_bufs = [EmbbBuffer() for _ in range(p.n_embb)]
        self.embb_rate_sum = [0.0] * p.n_embb
        self.t = 0
        self.steps_counted = 0
        self.tau_v_bar = 0.0
        self.tau_h_bar = 0.0
        self._loss_window: deque[tuple[int, int]] = deque()
        self._loss_dropped = 0
        self._loss_total = 0
        self._last_rates = (0.0, 0.0)
        self._last_embb_below = 1.0
        self._occ_total = 0.0
        self._rho_bar = 0.0
        self._tau_hat = 0.0
        return self._observation()

    # ---- stepping ----

    def step(self, action: int) -> StepOutcome:
        p = self.p
        if self.t >= p.episode_steps:
            raise RuntimeError("episode is over; call reset()")
        t_end = (self.t + 1) * p.tti_ms
        tti_s = p.tti_ms / 1000.0
        in_window = self.t >= p.warmup_steps

        # (1) arrivals
        for u in self.users:
            for pkt in u.video_src.take_until(t_end):
                u.video_buf.push(pkt)
            for pkt in u.haptic_src.take_until(t_end):
                u.haptic_buf.push(pkt)
        for buf in self.embb_bufs:
            buf.refill(p.traffic.embb_refill_bits)

        # (2) inter-slice split
        n_xr, n_embb = inter_slice_split(action, p.n_rbg)

        # (3) intra-slice counts
        if p.reuse_mode == "xr_full_reuse":
            xr_counts = [n_xr] * self.n_bodies
        else:
            xr_counts = allocate_counts(
                [
                    u.video_buf.occupancy_bits + u.haptic_buf.occupancy_bits
                    for u in self.users
                ],
                n_xr,
            )
        embb_counts = allocate_counts(
            [b.occupancy_bits for b in self.embb_bufs], n_embb
        )

        # (4) allocated rates
        xr_rates = [
            c * u.rbg_rate for c, u in zip(xr_counts, self.users)
        ]
        embb_rates = [
            c * r for c, r in zip(embb_counts, self.embb_rbg_rate)
        ]

        # (5) expiry at the end-of-TTI clock, then (6) drain haptic-first
        lat_v_tti: list[float] = []
        lat_h_tti: list[float] = []
        dropped_tti = 0
        delivered_tti = 0
        served_total = 0.0
        budget_total = 0.0
        for u, rate in zip(self.users, xr_rates):
            d = u.haptic_buf.drop_expired(t_end, p.traffic.tau_max_ms)
            d += u.video_buf.drop_expired(t_end, p.traffic.tau_max_ms)
            budget = rate * tti_s
            lat_h, served_h = u.haptic_buf.drain(budget, t_end)
            lat_v, served_v = u.video_buf.drain(budget - served_h, t_end)
            dropped_tti += d
            delivered_tti += len(lat_h) + len(lat_v)
            served_total += served_h + served_v
            budget_total += budget
            lat_v_tti.extend(lat_v)
            lat_h_tti.extend(lat_h)
            if in_window:
                u.rate_sum += rate
                u.dropped += d
                u.delivered += len(lat_h) + len(lat_v)
                for lat in lat_v:
                    u.lat_v_sum += lat
                u.lat_v_count += len(lat_v)
                for lat in lat_h:
                    u.lat_h_sum += lat
                u.lat_h_count += len(lat_h)
                u.hap_age_sum += u.haptic_buf.queue_age_mean_ms(t_end)
        for j, (buf, rate) in enumerate(zip(self.embb_bufs, embb_rates)):
            served = buf.drain(rate * tti_s)
            served_total += served
            budget_total += rate * tti_s
            if in_window:
                self.embb_rate_sum[j] += rate

        # (7) sliding statistics
        if lat_v_tti:
            self.tau_v_bar = sum(lat_v_tti) / len(lat_v_tti)
        if lat_h_tti:
            self.tau_h_bar = sum(lat_h_tti) / len(lat_h_tti)
        self._loss_window.append((dropped_tti, delivered_tti))
        self._loss_dropped += dropped_tti
        self._loss_total += dropped_tti + delivered_tti
        if len(self._loss_window) > p.loss_window_ttis:
            od, ot = self._loss_window.popleft()
            self._loss_dropped -= od
            self._loss_total -= od + ot
        rho_bar = (
            self._loss_dropped / self._loss_total if self._loss_total else 0.0
        )
        hap_count = 0
        hap_arrival_sum = 0.0
        occ_total = 0.0
        for u in self.users:
            hap_count += len(u.haptic_buf.queue)
            hap_arrival_sum += u.haptic_buf.arrival_sum_ms
            occ_total += (
                u.video_buf.occupancy_bits + u.haptic_buf.occupancy_bits
            )
        tau_hat = (t_end - hap_arrival_sum / hap_count) if hap_count else 0.0
        r_xr_bar = sum(xr_rates) / self.n_bodies
        r_embb_bar = sum(embb_rates) / p.n_embb

        # (8) reward
        breakdown = total_reward(
            xr_rate_bps=r_xr_bar,
            embb_rate_bps=r_embb_bar,
            plr_value=rho_bar,
            tau_v_ms=self.tau_v_bar,
            tau_h_ms=self.tau_h_bar,
            tau_hat_ms=tau_hat,
            targets=p.targets,
        )

        if in_window:
            self.steps_counted += 1
        self.t += 1
        self._occ_total = occ_total
        self._rho_bar = rho_bar
        self._tau_hat = tau_hat
        self._last_rates = (r_xr_bar, r_embb_bar)
        self._last_embb_below = (
            sum(1 for r in embb_rates if r < p.targets.embb_rate_target_bps)
            / p.n_embb
        )

        obs = self._observation()
        return StepOutcome(
            obs=obs,
            reward=clamp_reward(
                breakdown.total, p.reward_clamp_lo, p.reward_clamp_hi
            ),
            base_reward=clamp_reward(
                breakdown.base_total, p.reward_clamp_lo, p.reward_clamp_hi
            ),
            breakdown=breakdown,
            done=self.t >= p.episode_steps,
            info={
                "n_xr": n_xr,
                "n_embb": n_embb,
                "xr_counts": xr_counts,
                "embb_counts": embb_counts,
                "lat_v": lat_v_tti,
                "lat_h": lat_h_tti,
                "served_bits": served_total,
                "budget_bits": budget_total,
                "xr_rates": xr_rates,
                "embb_rates": embb_rates,
            },
        )

    def _observation(self) -> np.ndarray:
        p = self.p
        r_xr, r_embb = self._last_rates
        tau_max = p.traffic.tau_max_ms
        obs = np.array(
            [
                self._occ_total / self.occ_ref_bits if self.occ_ref_bits else 0.0,
                self.tau_v_bar / tau_max,
                self.tau_h_bar / tau_max,
                abs(self.tau_v_bar - self.tau_h_bar) / tau_max,
                self._rho_bar,
                r_xr / p.targets.xr_rate_target_bps,
                r_embb / p.targets.embb_rate_target_bps,
                self._last_embb_below,
            ]
        )
        np.clip(obs, 0.0, 1.0, out=obs)
        return obs

    # ---- episode reporting ----

    def episode_records(self, episode: int) -> list[dict]:
        """Per-user QoS rows over the recorded (post-warmup) window."""
        steps = max(self.steps_counted, 1)
        rows = []
        for i, u in enumerate(self.users):
            mean_rate = u.rate_sum / steps
            user_plr = plr(u.dropped, u.delivered)
            tau_v = u.lat_v_sum / u.lat_v_count if u.lat_v_count else 0.0
            tau_h = u.lat_h_sum / u.lat_h_count if u.lat_h_count else 0.0
            gap = abs(tau_v - tau_h)
            hap_delay = u.hap_age_sum / steps
            rows.append(
                {
                    "episode": episode,
                    "user_id": i,
                    "slice": "xr",
                    "mean_rate_bps": mean_rate,
                    "plr": user_plr,
                    "mean_tau_v_ms": tau_v,
                    "mean_tau_h_ms": tau_h,
                    "sync_gap_ms": gap,
                    "satisfied": int(
                        xr_satisfied(
                            mean_rate, user_plr, gap, hap_delay, self.p.targets
                        )
                    ),
                }
            )
        for j in range(self.p.n_embb):
            mean_rate = self.embb_rate_sum[j] / steps
            rows.append(
                {
                    "episode": episode,
                    "user_id": j,
                    "slice": "embb",
                    "mean_rate_bps": mean_rate,
                    "plr": 0.0,
                    "mean_tau_v_ms": 0.0,
                    "mean_tau_h_ms": 0.0,
                    "sync_gap_ms": 0.0,
                    "satisfied": int(
                        embb_satisfied(mean_rate, self.p.targets)
                    ),
                }
            )
        return rows
