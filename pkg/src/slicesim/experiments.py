"""Training/evaluation cells, seed bookkeeping, episode records, and report CSVs.

A *cell* is one (agent, density) pair. Training runs a fresh learner for a
fixed number of episodes on its own seed stream; evaluation replays a shared
per-density seed stream so every agent faces exactly the same layouts,
channels, and traffic phases (paired comparison). Heuristic agents skip
training.

Seed scheme (spawn-free, collision-free by construction):

* eval envs:  SeedSequence((master, density, 1, episode))     shared by agents
* train envs: SeedSequence((master, agent_id, density, 0, episode))
* agent:      SeedSequence((master, agent_id, density, 2))    init + sampling

agent_id: sac=0, sac-base=1, equal=2, demand=3.
"""

from __future__ import annotations

import csv
import json
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .baselines import DemandProportionalAgent, EqualSplitAgent
from .config import EnvParams, env_params, sac_params
from .deployment import layout_rows
from .env import SliceEnv
from .errors import ConfigError
from .metrics import empirical_cdf, satisfaction_summary
from .sac import DiscreteSAC, UpdateStats

AGENT_IDS = {"sac": 0, "sac-base": 1, "equal": 2, "demand": 3}
LEARNED_AGENTS = ("sac", "sac-base")
STREAM_TRAIN_ENV = 0
STREAM_EVAL_ENV = 1
STREAM_AGENT = 2

EPISODE_FIELDS = [
    "episode",
    "user_id",
    "slice",
    "mean_rate_bps",
    "plr",
    "mean_tau_v_ms",
    "mean_tau_h_ms",
    "sync_gap_ms",
    "satisfied",
]
TRAINING_LOG_FIELDS = [
    "step",
    "reward_mean",
    "critic1_loss",
    "critic2_loss",
    "actor_loss",
    "lambda",
    "entropy",
]
LAYOUT_FIELDS = ["entity_type", "id", "cluster_id", "x", "y", "z"]


def eval_env_seed(master: int, density: int, episode: int) -> tuple:
    return (master, density, STREAM_EVAL_ENV, episode)


def train_env_seed(master: int, agent: str, density: int, episode: int) -> tuple:
    return (master, AGENT_IDS[agent], density, STREAM_TRAIN_ENV, episode)


def agent_seed(master: int, agent: str, density: int) -> tuple:
    return (master, AGENT_IDS[agent], density, STREAM_AGENT)


def _rng(seed_tuple: tuple) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed_tuple))


def reward_kind(agent_name: str) -> str:
    """Which clamped reward signal the learner trains on."""
    return "base" if agent_name == "sac-base" else "full"


def make_agent(agent_name: str, cfg: dict, env: SliceEnv, master: int, density: int):
    if agent_name not in AGENT_IDS:
        raise ConfigError(
            f"unknown agent {agent_name!r}; available: {sorted(AGENT_IDS)}"
        )
    if agent_name in LEARNED_AGENTS:
        return DiscreteSAC(
            env.obs_dim,
            env.n_actions,
            sac_params(cfg),
            _rng(agent_seed(master, agent_name, density)),
        )
    if agent_name == "equal":
        return EqualSplitAgent(cfg["sim.n_rbg"])
    return DemandProportionalAgent(
        cfg["sim.n_rbg"], env.occ_ref_bits, env.embb_demand_bits
    )


@dataclass
class EpisodeStats:
    raw_return: float = 0.0
    learner_return: float = 0.0
    steps: int = 0
    updates: list[UpdateStats] = field(default_factory=list)


def run_episode(
    env: SliceEnv,
    agent,
    rng: np.random.Generator,
    train: bool = False,
    kind: str = "full",
) -> EpisodeStats:
    """One full episode; done flags are never bootstrapped (done=0 stored)."""
    obs = env.reset(rng)
    stats = EpisodeStats()
    while True:
        action = agent.act(obs, greedy=not train)
        out = env.step(action)
        r = out.reward if kind == "full" else out.base_reward
        if train and hasattr(agent, "record"):
            update = agent.record(obs, action, r, out.obs, 0.0)
            if update is not None:
                stats.updates.append(update)
        stats.raw_return += out.breakdown.total
        stats.learner_return += r
        stats.steps += 1
        obs = out.obs
        if out.done:
            break
    return stats


# ---- cells ----


def train_cell(
    cfg: dict, agent_name: str, density: int, master: int, cell_dir: str
) -> str:
    """Train one learner at one density; returns the policy path."""
    if agent_name not in LEARNED_AGENTS:
        raise ConfigError(f"agent {agent_name!r} has nothing to train")
    os.makedirs(cell_dir, exist_ok=True)
    params = env_params(cfg)
    env = SliceEnv(params, density)
    agent = make_agent(agent_name, cfg, env, master, density)
    kind = reward_kind(agent_name)
    log_rows = []
    total_steps = 0
    for ep in range(cfg["train.episodes"]):
        rng = _rng(train_env_seed(master, agent_name, density, ep))
        stats = run_episode(env, agent, rng, train=True, kind=kind)
        total_steps += stats.steps
        row = {
            "step": total_steps,
            "reward_mean": stats.learner_return / stats.steps,
        }
        if stats.updates:
            row["critic1_loss"] = float(
                np.mean([u.critic1_loss for u in stats.updates])
            )
            row["critic2_loss"] = float(
                np.mean([u.critic2_loss for u in stats.updates])
            )
            row["actor_loss"] = float(
                np.mean([u.actor_loss for u in stats.updates])
            )
            row["lambda"] = stats.updates[-1].lam
            row["entropy"] = stats.updates[-1].entropy
        else:
            row.update(
                {
                    "critic1_loss": "",
                    "critic2_loss": "",
                    "actor_loss": "",
                    "lambda": agent.lam,
                    "entropy": "",
                }
            )
        log_rows.append(row)
    policy_path = os.path.join(cell_dir, "policy.bin")
    agent.save_policy(policy_path)
    write_csv(
        os.path.join(cell_dir, "training_log.csv"), TRAINING_LOG_FIELDS, log_rows
    )
    return policy_path


def eval_cell(
    cfg: dict,
    agent_name: str,
    density: int,
    master: int,
    cell_dir: str,
    policy_path: str | None = None,
) -> list[dict]:
    """Greedy evaluation episodes on the shared per-density seed stream."""
    os.makedirs(cell_dir, exist_ok=True)
    params = env_params(cfg)
    env = SliceEnv(params, density)
    agent = make_agent(agent_name, cfg, env, master, density)
    if agent_name in LEARNED_AGENTS:
        if policy_path is None:
            raise ConfigError(
                f"agent {agent_name!r} needs a trained policy to evaluate"
            )
        agent.load_policy(policy_path)
    rows: list[dict] = []
    for ep in range(cfg["eval.episodes"]):
        rng = _rng(eval_env_seed(master, density, ep))
        run_episode(env, agent, rng, train=False, kind=reward_kind(agent_name))
        rows.extend(env.episode_records(ep))
        if ep == 0:
            write_csv(
                os.path.join(cell_dir, "layout.csv"),
                LAYOUT_FIELDS,
                layout_rows(env.layout),
            )
    write_csv(os.path.join(cell_dir, "episodes.csv"), EPISODE_FIELDS, rows)
    return rows


def cell_dir(out_dir: str, agent_name: str, density: int) -> str:
    return os.path.join(out_dir, agent_name, f"n{density}")


def run_cell(
    cfg: dict, agent_name: str, density: int, master: int, out_dir: str
) -> None:
    """Train (if learned) and evaluate one (agent, density) cell.

    Top-level so sweep workers can run cells in separate processes; each
    cell touches only its own directory and seed streams.
    """
    d = cell_dir(out_dir, agent_name, density)
    if agent_name in LEARNED_AGENTS:
        print(f"[sweep] train {agent_name} n={density}")
        policy = train_cell(cfg, agent_name, density, master, d)
    else:
        policy = None
    print(f"[sweep] eval {agent_name} n={density}")
    eval_cell(cfg, agent_name, density, master, d, policy)


def cell_done(out_dir: str, agent_name: str, density: int) -> bool:
    d = cell_dir(out_dir, agent_name, density)
    if not os.path.exists(os.path.join(d, "episodes.csv")):
        return False
    if agent_name in LEARNED_AGENTS:
        return os.path.exists(os.path.join(d, "policy.bin"))
    return True


# ---- reports ----


def build_reports(
    rows_by_cell: dict[tuple[str, int], list[dict]], out_dir: str
) -> None:
    """satisfaction.csv, cdf_sync.csv, embb_throughput.csv, summary.csv."""
    cells = sorted(rows_by_cell, key=lambda c: (c[1], AGENT_IDS[c[0]]))

    sat_rows = []
    for agent_name, density in cells:
        s = satisfaction_summary(rows_by_cell[(agent_name, density)])
        sat_rows.append(
            {
                "density": density,
                "agent": agent_name,
                "ratio": s["ratio"],
                "wilson_lo": s["wilson_lo"],
                "wilson_hi": s["wilson_hi"],
                "n": s["n"],
            }
        )
    write_csv(
        os.path.join(out_dir, "satisfaction.csv"),
        ["density", "agent", "ratio", "wilson_lo", "wilson_hi", "n"],
        sat_rows,
    )

    cdf_rows = []
    for agent_name, density in cells:
        gaps = [
            r["sync_gap_ms"]
            for r in rows_by_cell[(agent_name, density)]
            if r["slice"] == "xr"
        ]
        for x, p in empirical_cdf(gaps):
            cdf_rows.append(
                {
                    "density": density,
                    "agent": agent_name,
                    "sync_gap_ms": x,
                    "cdf": p,
                }
            )
    write_csv(
        os.path.join(out_dir, "cdf_sync.csv"),
        ["density", "agent", "sync_gap_ms", "cdf"],
        cdf_rows,
    )

    thr_rows = []
    for agent_name, density in cells:
        rates = [
            r["mean_rate_bps"]
            for r in rows_by_cell[(agent_name, density)]
            if r["slice"] == "embb"
        ]
        mean_mbps = (sum(rates) / len(rates)) / 1e6 if rates else 0.0
        thr_rows.append(
            {"density": density, "agent": agent_name, "mean_mbps": mean_mbps}
        )
    write_csv(
        os.path.join(out_dir, "embb_throughput.csv"),
        ["density", "agent", "mean_mbps"],
        thr_rows,
    )

    # sac vs each baseline present at the same density
    sat_by = {(r["agent"], r["density"]): r["ratio"] for r in sat_rows}
    summary_rows = []
    for agent_name, density in cells:
        if agent_name == "sac" or ("sac", density) not in sat_by:
            continue
        sac_ratio = sat_by[("sac", density)]
        base_ratio = sat_by[(agent_name, density)]
        rel = (sac_ratio - base_ratio) / base_ratio if base_ratio > 0 else ""
        summary_rows.append(
            {
                "density": density,
                "baseline": agent_name,
                "sac_ratio": sac_ratio,
                "baseline_ratio": base_ratio,
                "rel_improvement": rel,
            }
        )
    write_csv(
        os.path.join(out_dir, "summary.csv"),
        ["density", "baseline", "sac_ratio", "baseline_ratio", "rel_improvement"],
        summary_rows,
    )


def load_cell_rows(out_dir: str) -> dict[tuple[str, int], list[dict]]:
    """Recover per-cell episode rows from an output tree (for `report`)."""
    found: dict[tuple[str, int], list[dict]] = {}
    for agent_name in sorted(AGENT_IDS):
        agent_dir = os.path.join(out_dir, agent_name)
        if not os.path.isdir(agent_dir):
            continue
        for entry in sorted(os.listdir(agent_dir)):
            if not entry.startswith("n") or not entry[1:].isdigit():
                continue
            path = os.path.join(agent_dir, entry, "episodes.csv")
            if not os.path.exists(path):
                continue
            density = int(entry[1:])
            with open(path, newline="") as f:
                rows = []
                for raw in csv.DictReader(f):
                    rows.append(
                        {
                            "episode": int(raw["episode"]),
                            "user_id": int(raw["user_id"]),
                            "slice": raw["slice"],
                            "mean_rate_bps": float(raw["mean_rate_bps"]),
                            "plr": float(raw["plr"]),
                            "mean_tau_v_ms": float(raw["mean_tau_v_ms"]),
                            "mean_tau_h_ms": float(raw["mean_tau_h_ms"]),
                            "sync_gap_ms": float(raw["sync_gap_ms"]),
                            "satisfied": int(raw["satisfied"]),
                        }
                    )
            found[(agent_name, density)] = rows
    return found


# ---- manifest and CSV plumbing ----


def write_csv(path: str, fieldnames: list[str], rows: list[dict]) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def write_manifest(
    out_dir: str,
    command: str,
    cfg: dict,
    master: int,
    agents: list[str],
    densities: list[int],
    preset: str | None,
) -> str:
    """Record everything needed to reproduce the run, before results exist."""
    cells = []
    for agent_name in agents:
        for density in densities:
            cell: dict = {"agent": agent_name, "density": density}
            if agent_name in LEARNED_AGENTS and command in ("train", "sweep"):
                cell["train_env_seeds"] = [
                    list(train_env_seed(master, agent_name, density, ep))
                    for ep in range(cfg["train.episodes"])
                ]
                cell["agent_seed"] = list(agent_seed(master, agent_name, density))
            if command in ("eval", "sweep"):
                cell["eval_env_seeds"] = [
                    list(eval_env_seed(master, density, ep))
                    for ep in range(cfg["eval.episodes"])
                ]
            cells.append(cell)
    manifest = {
        "command": command,
        "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "package_version": __version__,
        "master_seed": master,
        "preset": preset,
        "config": {k: list(v) if isinstance(v, tuple) else v for k, v in cfg.items()},
        "seed_scheme": (
            "SeedSequence((master, density, 1, episode)) for shared eval envs; "
            "SeedSequence((master, agent_id, density, 0, episode)) for train envs; "
            "SeedSequence((master, agent_id, density, 2)) for agent init/sampling; "
            "agent_id: sac=0, sac-base=1, equal=2, demand=3"
        ),
        "cells": cells,
    }
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return path
