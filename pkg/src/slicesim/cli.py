"""Command line entry point.

Subcommands:

* train   train a learned agent at each density; one checkpoint per density
* eval    greedy evaluation episodes; per-user QoS records + report CSVs
* sweep   full agent x density grid (train + eval), resumable per cell
* report  rebuild report CSVs from an existing output tree

Every run writes a manifest (resolved config, seeds, version) to the output
directory before any result file, so results are reproducible from the
manifest alone. Exit codes: 0 ok, 2 config error, 3 infeasible layout,
4 checkpoint error, 1 anything else.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor, as_completed

from .config import PRESETS, load_config
from .errors import CheckpointError, ConfigError, InfeasibleLayoutError
from .experiments import (
    AGENT_IDS,
    LEARNED_AGENTS,
    build_reports,
    cell_dir,
    cell_done,
    eval_cell,
    load_cell_rows,
    run_cell,
    train_cell,
    write_manifest,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slice-sim",
        description="RBG slicing simulator with a soft actor-critic controller",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, needs_agent: bool) -> None:
        p.add_argument("--config", help="key = value config file")
        p.add_argument(
            "--preset", choices=sorted(PRESETS), help="named config preset"
        )
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override one config key (repeatable)",
        )
        p.add_argument(
            "--densities",
            help="comma-separated XR user counts (overrides sim.densities)",
        )
        p.add_argument("--seed", type=int, default=0, help="master seed")
        p.add_argument("--out", required=True, help="output directory")
        if needs_agent:
            p.add_argument(
                "--agent",
                required=True,
                choices=sorted(AGENT_IDS),
                help="slice controller",
            )

    p_train = sub.add_parser("train", help="train a learned agent")
    common(p_train, needs_agent=True)

    p_eval = sub.add_parser("eval", help="evaluate an agent")
    common(p_eval, needs_agent=True)
    p_eval.add_argument(
        "--policy-dir",
        help="directory tree holding <agent>/n<density>/policy.bin "
        "(default: the output directory itself)",
    )

    p_sweep = sub.add_parser("sweep", help="train + evaluate the agent grid")
    common(p_sweep, needs_agent=False)
    p_sweep.add_argument(
        "--agents",
        default=",".join(sorted(AGENT_IDS, key=AGENT_IDS.get)),
        help="comma-separated agents to sweep",
    )
    p_sweep.add_argument(
        "--workers",
        type=int,
        default=1,
        help="max cells to run in parallel (cells are independent)",
    )

    p_report = sub.add_parser("report", help="rebuild report CSVs")
    p_report.add_argument("--out", required=True, help="output directory")
    return parser


def _parse_overrides(pairs: list[str]) -> dict:
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"--set expects KEY=VALUE, got {pair!r}")
        key, _, value = pair.partition("=")
        out[key.strip()] = value.strip()
    return out


def _load(args) -> dict:
    overrides = _parse_overrides(args.overrides)
    if args.densities:
        overrides["sim.densities"] = args.densities
    return load_config(args.config, args.preset, overrides)


def _policy_path(base_dir: str, agent: str, density: int) -> str:
    return os.path.join(cell_dir(base_dir, agent, density), "policy.bin")


def cmd_train(args) -> int:
    cfg = _load(args)
    if args.agent not in LEARNED_AGENTS:
        raise ConfigError(f"agent {args.agent!r} has nothing to train")
    densities = list(cfg["sim.densities"])
    write_manifest(
        args.out, "train", cfg, args.seed, [args.agent], densities, args.preset
    )
    for density in densities:
        print(f"[train] {args.agent} n={density}")
        train_cell(
            cfg, args.agent, density, args.seed,
            cell_dir(args.out, args.agent, density),
        )
    return 0


def cmd_eval(args) -> int:
    cfg = _load(args)
    densities = list(cfg["sim.densities"])
    write_manifest(
        args.out, "eval", cfg, args.seed, [args.agent], densities, args.preset
    )
    rows_by_cell = {}
    policy_base = args.policy_dir or args.out
    for density in densities:
        print(f"[eval] {args.agent} n={density}")
        policy = (
            _policy_path(policy_base, args.agent, density)
            if args.agent in LEARNED_AGENTS
            else None
        )
        rows_by_cell[(args.agent, density)] = eval_cell(
            cfg, args.agent, density, args.seed,
            cell_dir(args.out, args.agent, density), policy,
        )
    build_reports(rows_by_cell, args.out)
    return 0


def cmd_sweep(args) -> int:
    cfg = _load(args)
    agents = [a.strip() for a in args.agents.split(",") if a.strip()]
    for a in agents:
        if a not in AGENT_IDS:
            raise ConfigError(f"unknown agent {a!r} in --agents")
    if args.workers < 1:
        raise ConfigError("--workers must be at least 1")
    densities = list(cfg["sim.densities"])
    write_manifest(args.out, "sweep", cfg, args.seed, agents, densities, args.preset)
    pending = []
    for agent in agents:
        for density in densities:
            if cell_done(args.out, agent, density):
                print(f"[sweep] {agent} n={density}: already complete, skipping")
            else:
                pending.append((agent, density))
    if args.workers == 1 or len(pending) <= 1:
        for agent, density in pending:
            run_cell(cfg, agent, density, args.seed, args.out)
    else:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            futures = {
                pool.submit(run_cell, cfg, agent, density, args.seed, args.out):
                (agent, density)
                for agent, density in pending
            }
            for fut in as_completed(futures):
                fut.result()  # surface worker failures
    rows_by_cell = {
        cell: rows
        for cell, rows in load_cell_rows(args.out).items()
        if cell[0] in agents and cell[1] in densities
    }
    build_reports(rows_by_cell, args.out)
    return 0


def cmd_report(args) -> int:
    rows_by_cell = load_cell_rows(args.out)
    if not rows_by_cell:
        raise ConfigError(f"no episode records found under {args.out}")
    build_reports(rows_by_cell, args.out)
    print(f"[report] rebuilt reports from {len(rows_by_cell)} cells")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "train": cmd_train,
        "eval": cmd_eval,
        "sweep": cmd_sweep,
        "report": cmd_report,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleLayoutError as exc:
        print(f"infeasible layout: {exc}", file=sys.stderr)
        return 3
    except CheckpointError as exc:
        print(f"checkpoint error: {exc}", file=sys.stderr)
        return 4
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
