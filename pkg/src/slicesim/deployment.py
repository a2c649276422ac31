"""Indoor deployment sampling: room geometry, eMBB users, and clustered in-body subnetworks.

The room is a fixed 50 x 50 x 3 m hall with a single ceiling-mounted macro BS.
In-body subnetworks (one per person) are dropped with a Thomas cluster process:
a handful of cluster centers land uniformly on the floor with a minimum mutual
separation, and each body is a Gaussian offset around a uniformly chosen center.
Each body carries a wearable access point at the top of a 1.9 m cylinder and an
in-body device node at 1.6 m height on the cylinder axis.

Functions
---------
distance3d            Euclidean distance between two points.
sample_cluster_centers Rejection-sample separated cluster centers.
sample_layout         Draw one full episode layout.
layout_rows           Flatten a layout into CSV-friendly rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleLayoutError

ROOM_X_M = 50.0
ROOM_Y_M = 50.0
ROOM_Z_M = 3.0
MACRO_POS_M = (25.0, 25.0, 3.0)

BODY_RADIUS_M = 0.25
BODY_HEIGHT_M = 1.9
DEVICE_HEIGHT_M = 1.6

MAX_ATTEMPTS = 100_000


@dataclass
class DeployParams:
    n_clusters: int = 5
    cluster_min_sep_m: float = 4.0
    cluster_sigma_m: float = 2.0
    body_min_sep_m: float = 0.5
    embb_height_m: float = 1.5


@dataclass
class Layout:
    """One sampled deployment. Positions are (x, y, z) in meters."""

    macro_pos: np.ndarray
    cluster_centers: np.ndarray      # (C, 3), on the floor
    body_cluster: np.ndarray         # (N,) int, parent cluster of each body
    ap_pos: np.ndarray               # (N, 3), wearable AP per body
    device_pos: np.ndarray           # (N, 3), in-body node per body
    embb_pos: np.ndarray             # (M, 3)
    params: DeployParams = field(default_factory=DeployParams)

    @property
    def n_bodies(self) -> int:
        return self.ap_pos.shape[0]

    @property
    def n_embb(self) -> int:
        return self.embb_pos.shape[0]


def distance3d(a, b) -> float:
    """Euclidean distance between two 3-vectors."""
    return math.sqrt(
        (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 + (a[2] - b[2]) ** 2
    )


def distance2d(a, b) -> float:
    """Horizontal (x, y) distance between two points."""
    return math.hypot(a[0] - b[0], a[1] - b[1])


def sample_cluster_centers(
    n_clusters: int, min_sep_m: float, rng: np.random.Generator
) -> np.ndarray:
    """Uniform floor positions with pairwise separation >= min_sep_m.

    Plain rejection sampling; raises InfeasibleLayoutError once the total
    draw budget is exhausted (dense requests may simply not fit the room).
    """
    centers: list[tuple[float, float]] = []
    attempts = 0
    while len(centers) < n_clusters:
        if attempts >= MAX_ATTEMPTS:
            raise InfeasibleLayoutError(
                f"could not place {n_clusters} cluster centers with "
                f"min separation {min_sep_m} m after {MAX_ATTEMPTS} draws"
            )
        attempts += 1
        x = rng.uniform(0.0, ROOM_X_M)
        y = rng.uniform(0.0, ROOM_Y_M)
        if all(math.hypot(x - cx, y - cy) >= min_sep_m for cx, cy in centers):
            centers.append((x, y))
    out = np.zeros((n_clusters, 3))
    out[:, 0] = [c[0] for c in centers]
    out[:, 1] = [c[1] for c in centers]
    return out


def _sample_body_centers(
    centers: np.ndarray,
    n_bodies: int,
    params: DeployParams,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian offsets around uniformly chosen parents, bodies kept apart."""
    lo = BODY_RADIUS_M
    check_sep = params.body_min_sep_m > 0.0
    placed: list[tuple[float, float]] = []
    parent = np.zeros(n_bodies, dtype=np.int64)
    attempts = 0
    i = 0
    while i < n_bodies:
        if attempts >= MAX_ATTEMPTS:
            raise InfeasibleLayoutError(
                f"could not place {n_bodies} bodies with min separation "
                f"{params.body_min_sep_m} m after {MAX_ATTEMPTS} draws"
            )
        attempts += 1
        c = int(rng.integers(len(centers)))
        ox, oy = rng.normal(0.0, params.cluster_sigma_m, size=2)
        x = centers[c, 0] + ox
        y = centers[c, 1] + oy
        if not (lo <= x <= ROOM_X_M - lo and lo <= y <= ROOM_Y_M - lo):
            continue
        if check_sep and any(
            math.hypot(x - px, y - py) < params.body_min_sep_m
            for px, py in placed
        ):
            continue
        placed.append((x, y))
        parent[i] = c
        i += 1
    xy = np.array(placed)
    return xy, parent


def sample_layout(
    n_bodies: int,
    n_embb: int,
    params: DeployParams,
    rng: np.random.Generator,
) -> Layout:
    """Draw one episode layout: clusters, bodies, and eMBB users."""
    centers = sample_cluster_centers(
        params.n_clusters, params.cluster_min_sep_m, rng
    )
    body_xy, parent = _sample_body_centers(centers, n_bodies, params, rng)

    ap = np.zeros((n_bodies, 3))
    ap[:, :2] = body_xy
    ap[:, 2] = BODY_HEIGHT_M
    dev = np.zeros((n_bodies, 3))
    dev[:, :2] = body_xy
    dev[:, 2] = DEVICE_HEIGHT_M

    embb = np.zeros((n_embb, 3))
    embb[:, 0] = rng.uniform(0.0, ROOM_X_M, size=n_embb)
    embb[:, 1] = rng.uniform(0.0, ROOM_Y_M, size=n_embb)
    embb[:, 2] = params.embb_height_m

    return Layout(
        macro_pos=np.array(MACRO_POS_M),
        cluster_centers=centers,
        body_cluster=parent,
        ap_pos=ap,
        device_pos=dev,
        embb_pos=embb,
        params=params,
    )


def layout_rows(layout: Layout) -> list[dict]:
    """Rows (entity_type, id, cluster_id, x, y, z) for the layout CSV."""
    rows = [
        {
            "entity_type": "macro",
            "id": 0,
            "cluster_id": -1,
            "x": layout.macro_pos[0],
            "y": layout.macro_pos[1],
            "z": layout.macro_pos[2],
        }
    ]
    for i, c in enumerate(layout.cluster_centers):
        rows.append(
            {
                "entity_type": "cluster_center",
                "id": i,
                "cluster_id": i,
                "x": c[0],
                "y": c[1],
                "z": c[2],
            }
        )
    for i in range(layout.n_bodies):
        cid = int(layout.body_cluster[i])
        for kind, pos in (
            ("ibs_ap", layout.ap_pos[i]),
            ("ibs_device", layout.device_pos[i]),
        ):
            rows.append(
                {
                    "entity_type": kind,
                    "id": i,
                    "cluster_id": cid,
                    "x": pos[0],
                    "y": pos[1],
                    "z": pos[2],
                }
            )
    for i in range(layout.n_embb):
        p = layout.embb_pos[i]
        rows.append(
            {
                "entity_type": "embb_user",
                "id": i,
                "cluster_id": -1,
                "x": p[0],
                "y": p[1],
                "z": p[2],
            }
        )
    return rows
