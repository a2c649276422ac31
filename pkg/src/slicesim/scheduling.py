"""RBG scheduling: inter-slice split and buffer-proportional intra-slice shares.

The slice controller's action is the number of RBGs handed to the XR slice;
the eMBB slice gets the remainder. Inside a slice each user receives
floor(share * k) RBGs where share is its buffer occupancy over the slice
total, and the leftover groups go to the largest fractional remainders
(ties broken toward the lower user index). An all-empty slice falls back to
round-robin starting at user 0, so capacity is never parked.

allocate_counts is the scalar per-TTI route; allocate_counts_batch is the
vectorized equivalent used for bulk verification and sweeps. Both must agree
exactly.
"""

from __future__ import annotations

import math

import numpy as np


def inter_slice_split(action: int, n_rbg_total: int) -> tuple[int, int]:
    """Map the controller action to (XR RBGs, eMBB RBGs)."""
    if not 0 <= action <= n_rbg_total:
        raise ValueError(f"action {action} outside [0, {n_rbg_total}]")
    return action, n_rbg_total - action


def allocate_counts(buffer_bits, n_rbg_slice: int) -> list[int]:
    """Integer RBG counts per user, proportional to buffer occupancy.

    buffer_bits: per-user queued bits (non-negative).
    """
    n = len(buffer_bits)
    if n == 0:
        return []
    if n_rbg_slice < 0:
        raise ValueError("negative RBG count")
    total = 0.0
    for b in buffer_bits:
        if b < 0:
            raise ValueError("negative buffer occupancy")
        total += b
    if total <= 0.0:
        # empty slice: round-robin from user 0
        q, r = divmod(n_rbg_slice, n)
        return [q + 1 if i < r else q for i in range(n)]
    base = []
    rem_key = []
    for b in buffer_bits:
        prod = b * n_rbg_slice
        f = math.floor(prod / total)
        base.append(f)
        rem_key.append(prod - f * total)
    leftover = n_rbg_slice - sum(base)
    order = sorted(range(n), key=lambda i: (-rem_key[i], i))
    counts = list(base)
    for i in order[:leftover]:
        counts[i] += 1
    return counts


def allocate_counts_batch(
    buffer_bits: np.ndarray, n_rbg_slice
) -> np.ndarray:
    """Vectorized allocate_counts over rows of buffer_bits.

    buffer_bits: (B, n) array; n_rbg_slice: scalar or (B,) ints.
    Returns (B, n) int64 counts.
    """
    buf = np.asarray(buffer_bits, dtype=np.float64)
    if buf.ndim != 2:
        raise ValueError("buffer_bits must be 2-D")
    b_rows, n = buf.shape
    if np.any(buf < 0):
        raise ValueError("negative buffer occupancy")
    k = np.broadcast_to(
        np.asarray(n_rbg_slice, dtype=np.int64), (b_rows,)
    ).copy()
    if np.any(k < 0):
        raise ValueError("negative RBG count")

    total = buf.sum(axis=1)
    nonzero = total > 0.0
    safe_total = np.where(nonzero, total, 1.0)

    prod = buf * k[:, None].astype(np.float64)
    base = np.floor(prod / safe_total[:, None]).astype(np.int64)
    rem_key = prod - base * safe_total[:, None]
    leftover = k - base.sum(axis=1)

    # stable argsort of the negated key = descending key, ties by user index
    order = np.argsort(-rem_key, axis=1, kind="stable")
    ranks = np.empty_like(order)
    np.put_along_axis(
        ranks, order, np.broadcast_to(np.arange(n), (b_rows, n)), axis=1
    )
    counts = base + (ranks < leftover[:, None])

    if not np.all(nonzero):
        zero_rows = np.nonzero(~nonzero)[0]
        kz = k[zero_rows]
        counts[zero_rows] = (kz // n)[:, None] + (
            np.arange(n)[None, :] < (kz % n)[:, None]
        )
    return counts


def assign_rbg_indices(counts, start: int = 0) -> list[range]:
    """Contiguous RBG index blocks per user, in user order from `start`."""
    blocks = []
    pos = start
    for c in counts:
        blocks.append(range(pos, pos + c))
        pos += c
    return blocks
