"""Traffic sources and FIFO radio-bearer buffers.

XR flows are deterministic periodic streams with a per-flow random phase:
a video stream of fixed-size frames and a high-rate haptic stream of small
packets. Packets queue in per-flow FIFO buffers, are drained front-first
(partial service keeps a packet queued with reduced remaining bits), and are
dropped once strictly older than the delay ceiling. eMBB users are modeled
full-buffer: their aggregate queue is refilled to a fixed level every TTI.

Functions and classes
---------------------
PeriodicSource    deterministic arrival process with random phase
FlowBuffer        FIFO queue with drain / expiry / loss bookkeeping
EmbbBuffer        scalar full-buffer queue
generate_arrivals arrivals of a source inside one TTI window
plr               packet loss ratio from drop/delivery counters
"""

from __future__ import annotations

from dataclasses import dataclass
from collections import deque

import numpy as np


@dataclass
class TrafficParams:
    video_fps: float = 90.0
    frame_bits: int = 666_667
    haptic_pps: float = 1000.0
    haptic_bits: int = 512
    tau_max_ms: float = 200.0
    embb_refill_bits: float = 4_000_000.0


@dataclass
class Packet:
    __slots__ = ("arrival_ms", "bits", "remaining_bits")
    arrival_ms: float
    bits: float
    remaining_bits: float


class PeriodicSource:
    """Emits one packet every 1000/rate_pps ms starting at a random phase."""

    __slots__ = ("period_ms", "packet_bits", "next_ms")

    def __init__(
        self, rate_pps: float, packet_bits: float, rng: np.random.Generator
    ):
        self.period_ms = 1000.0 / rate_pps
        self.packet_bits = float(packet_bits)
        self.next_ms = float(rng.uniform(0.0, self.period_ms))

    def take_until(self, t1_ms: float) -> list[Packet]:
        """All packets with arrival time < t1_ms not yet emitted."""
        out = []
        while self.next_ms < t1_ms:
            out.append(
                Packet(self.next_ms, self.packet_bits, self.packet_bits)
            )
            self.next_ms += self.period_ms
        return out


def generate_arrivals(
    source: PeriodicSource, t0_ms: float, t1_ms: float
) -> list[Packet]:
    """Arrivals of `source` inside [t0_ms, t1_ms).

    Windows must be consumed in order; t0_ms only sanity-checks that.
    """
    if source.next_ms < t0_ms:
        raise ValueError("arrival windows must be consumed in order")
    return source.take_until(t1_ms)


class FlowBuffer:
    """FIFO packet queue for one flow of one user.

    Tracks cumulative delivery/drop counters and the running sum of queued
    arrival times so the instantaneous mean queue age is O(1).
    """

    __slots__ = (
        "queue",
        "occupancy_bits",
        "delivered_count",
        "dropped_count",
        "arrival_sum_ms",
        "arrived_bits",
        "served_bits",
        "dropped_bits",
    )

    def __init__(self):
        self.queue: deque[Packet] = deque()
        self.occupancy_bits = 0.0
        self.delivered_count = 0
        self.dropped_count = 0
        self.arrival_sum_ms = 0.0
        self.arrived_bits = 0.0
        self.served_bits = 0.0
        self.dropped_bits = 0.0

    def push(self, pkt: Packet) -> None:
        self.queue.append(pkt)
        self.occupancy_bits += pkt.remaining_bits
        self.arrival_sum_ms += pkt.arrival_ms
        self.arrived_bits += pkt.bits

    def drop_expired(self, now_ms: float, tau_max_ms: float) -> int:
        """Remove packets strictly older than tau_max_ms; age == limit stays."""
        dropped = 0
        q = self.queue
        while q and now_ms - q[0].arrival_ms > tau_max_ms:
            pkt = q.popleft()
            self.occupancy_bits -= pkt.remaining_bits
            self.arrival_sum_ms -= pkt.arrival_ms
            self.dropped_bits += pkt.remaining_bits
            dropped += 1
        self.dropped_count += dropped
        return dropped

    def drain(self, budget_bits: float, now_ms: float) -> tuple[list[float], float]:
        """Serve up to budget_bits front-first.

        Returns (latencies of fully delivered packets, bits served). A packet
        only counts as delivered once its last bit is sent; a partially served
        head-of-line packet stays queued with reduced remaining bits.
        """
        latencies: list[float] = []
        served = 0.0
        q = self.queue
        while q and budget_bits > 0.0:
            pkt = q[0]
            if pkt.remaining_bits <= budget_bits:
                budget_bits -= pkt.remaining_bits
                served += pkt.remaining_bits
                self.occupancy_bits -= pkt.remaining_bits
                self.arrival_sum_ms -= pkt.arrival_ms
                latencies.append(now_ms - pkt.arrival_ms)
                self.delivered_count += 1
                q.popleft()
            else:
                pkt.remaining_bits -= budget_bits
                self.occupancy_bits -= budget_bits
                served += budget_bits
                budget_bits = 0.0
        self.served_bits += served
        return latencies, served

    def queue_age_mean_ms(self, now_ms: float) -> float:
        """Mean age of queued packets; 0 when empty."""
        n = len(self.queue)
        if n == 0:
            return 0.0
        return now_ms - self.arrival_sum_ms / n


class EmbbBuffer:
    """Aggregate full-buffer queue; refilled to a fixed level each TTI."""

    __slots__ = ("occupancy_bits", "arrived_bits", "served_bits")

    def __init__(self):
        self.occupancy_bits = 0.0
        self.arrived_bits = 0.0
        self.served_bits = 0.0

    def refill(self, level_bits: float) -> float:
        added = max(0.0, level_bits - self.occupancy_bits)
        self.occupancy_bits += added
        self.arrived_bits += added
        return added

    def drain(self, budget_bits: float) -> float:
        served = min(budget_bits, self.occupancy_bits)
        self.occupancy_bits -= served
        self.served_bits += served
        return served


def plr(dropped: int, delivered: int) -> float:
    """Packet loss ratio; 0 when nothing terminated yet."""
    total = dropped + delivered
    if total == 0:
        return 0.0
    return dropped / total
