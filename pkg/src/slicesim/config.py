"""Flat key=value configuration with schema validation and presets.

Config files are plain text, one `section.key = value` per line, `#` comments
allowed. Every key must exist in the schema (typo'd or unknown keys fail fast
with the offending path), and values are coerced to the schema type. The
`desk` preset shrinks episodes and batches for quick runs on a laptop core
while leaving all physics untouched.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

from .channel import ChannelParams
from .deployment import DeployParams
from .errors import ConfigError
from .reward import QosTargets
from .sac import SacParams
from .traffic import TrafficParams

# value types: int, float, str, or "int_list" (comma separated)
_SCHEMA: dict[str, tuple] = {
    "sim.tti_ms": (float, 1.0),
    "sim.episode_steps": (int, 10_000),
    "sim.warmup_steps": (int, 200),
    "sim.n_rbg": (int, 17),
    "sim.embb_users": (int, 5),
    "sim.densities": ("int_list", (10, 15, 20, 25)),
    "sim.reuse_mode": (str, "off"),
    "train.episodes": (int, 10),
    "eval.episodes": (int, 100),
    "deploy.clusters": (int, 5),
    "deploy.cluster_min_sep_m": (float, 4.0),
    "deploy.cluster_sigma_m": (float, 2.0),
    "deploy.body_min_sep_m": (float, 0.5),
    "deploy.embb_height_m": (float, 1.5),
    "chan.fc_ghz": (float, 4.0),
    "chan.noise_figure_db": (float, 7.0),
    "chan.noise_density_dbm_hz": (float, -174.0),
    "chan.macro_tx_dbm": (float, 31.0),
    "chan.ap_tx_dbm": (float, 10.0),
    "chan.se_att": (float, 1.0),
    "chan.se_max": (float, 17.65),
    "chan.sinr_min_db": (float, -10.0),
    "chan.shadow_sigma_los_db": (float, 3.0),
    "chan.shadow_sigma_nlos_db": (float, 8.03),
    "traffic.video_fps": (float, 90.0),
    "traffic.frame_bits": (int, 666_667),
    "traffic.haptic_pps": (float, 1000.0),
    "traffic.haptic_bits": (int, 512),
    "traffic.tau_max_ms": (float, 200.0),
    "traffic.embb_refill_bits": (float, 4_000_000.0),
    "qos.xr_rate_target_mbps": (float, 60.0),
    "qos.embb_rate_target_mbps": (float, 45.0),
    "qos.plr_target": (float, 1e-5),
    "qos.sync_budget_ms": (float, 50.0),
    "qos.haptic_delay_target_ms": (float, 10.0),
    "reward.clamp_lo": (float, -10.0),
    "reward.clamp_hi": (float, 0.0),
    "reward.loss_window_ttis": (int, 200),
    "sac.hidden": ("int_list", (400, 300, 200, 100)),
    "sac.gamma": (float, 0.9),
    "sac.lr": (float, 1e-4),
    "sac.batch": (int, 1024),
    "sac.buffer": (int, 1_000_000),
    "sac.tau": (float, 0.005),
    "sac.lambda_init": (float, 0.2),
    "sac.entropy_target_frac": (float, 0.6),
    "sac.update_every": (int, 1),
    "sac.warmup_factor": (int, 10),
}

PRESETS: dict[str, dict] = {
    "desk": {
        "sim.episode_steps": 2000,
        "sac.batch": 256,
        "eval.episodes": 10,
        "sac.update_every": 2,
        "train.episodes": 13,
    },
}

REUSE_MODES = ("off", "xr_full_reuse")


def default_config() -> dict:
    return {k: v for k, (_, v) in _SCHEMA.items()}


def _coerce(key: str, raw, kind):
    if kind == "int_list":
        if isinstance(raw, (tuple, list)):
            return tuple(int(v) for v in raw)
        try:
            return tuple(int(p.strip()) for p in str(raw).split(",") if p.strip())
        except ValueError as exc:
            raise ConfigError(f"{key}: expected comma-separated ints, got {raw!r}") from exc
    if kind is int:
        try:
            if isinstance(raw, str):
                return int(raw, 0)
            if float(raw) != int(raw):
                raise ValueError
            return int(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{key}: expected int, got {raw!r}") from exc
    if kind is float:
        try:
            return float(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{key}: expected float, got {raw!r}") from exc
    return str(raw)


def apply_overrides(cfg: dict, overrides: dict) -> dict:
    """Validate and merge key=value overrides into a config dict."""
    out = copy.deepcopy(cfg)
    for key, raw in overrides.items():
        if key not in _SCHEMA:
            raise ConfigError(f"unknown config key: {key}")
        out[key] = _coerce(key, raw, _SCHEMA[key][0])
    return out


def parse_config_text(text: str) -> dict:
    """Parse `key = value` lines into an override dict (not yet merged)."""
    overrides: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected `key = value`, got {line!r}")
        key, _, value = stripped.partition("=")
        overrides[key.strip()] = value.strip()
    return overrides


def load_config(
    path: str | None = None,
    preset: str | None = None,
    overrides: dict | None = None,
) -> dict:
    """Defaults, then preset, then file, then explicit overrides."""
    cfg = default_config()
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(
                f"unknown preset {preset!r}; available: {sorted(PRESETS)}"
            )
        cfg = apply_overrides(cfg, PRESETS[preset])
    if path is not None:
        try:
            with open(path) as f:
                text = f.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        cfg = apply_overrides(cfg, parse_config_text(text))
    if overrides:
        cfg = apply_overrides(cfg, overrides)
    _validate(cfg)
    return cfg


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def _validate(cfg: dict) -> None:
    _require(cfg["sim.tti_ms"] > 0, "sim.tti_ms must be positive")
    _require(cfg["sim.episode_steps"] > 0, "sim.episode_steps must be positive")
    _require(
        0 <= cfg["sim.warmup_steps"] < cfg["sim.episode_steps"],
        "sim.warmup_steps must be in [0, sim.episode_steps)",
    )
    _require(cfg["sim.n_rbg"] > 0, "sim.n_rbg must be positive")
    _require(cfg["sim.embb_users"] > 0, "sim.embb_users must be positive")
    _require(len(cfg["sim.densities"]) > 0, "sim.densities must be non-empty")
    _require(
        all(d > 0 for d in cfg["sim.densities"]),
        "sim.densities must be positive",
    )
    _require(
        cfg["sim.reuse_mode"] in REUSE_MODES,
        f"sim.reuse_mode must be one of {REUSE_MODES}",
    )
    _require(cfg["traffic.tau_max_ms"] > 0, "traffic.tau_max_ms must be positive")
    _require(
        cfg["traffic.tau_max_ms"] > cfg["qos.haptic_delay_target_ms"],
        "traffic.tau_max_ms must exceed qos.haptic_delay_target_ms",
    )
    _require(0 <= cfg["qos.plr_target"] < 1, "qos.plr_target must be in [0, 1)")
    _require(
        cfg["reward.clamp_lo"] <= cfg["reward.clamp_hi"],
        "reward.clamp_lo must not exceed reward.clamp_hi",
    )
    _require(cfg["reward.loss_window_ttis"] > 0, "reward.loss_window_ttis must be positive")
    _require(len(cfg["sac.hidden"]) >= 1, "sac.hidden must name at least one layer")
    _require(cfg["sac.batch"] > 0, "sac.batch must be positive")
    _require(cfg["sac.buffer"] >= cfg["sac.batch"], "sac.buffer must hold a batch")
    _require(0 < cfg["sac.tau"] <= 1, "sac.tau must be in (0, 1]")
    _require(cfg["sac.update_every"] >= 1, "sac.update_every must be >= 1")


# ---- resolution into runtime parameter objects ----


@dataclass
class EnvParams:
    tti_ms: float = 1.0
    episode_steps: int = 10_000
    warmup_steps: int = 200
    n_rbg: int = 17
    n_embb: int = 5
    reuse_mode: str = "off"
    loss_window_ttis: int = 200
    reward_clamp_lo: float = -10.0
    reward_clamp_hi: float = 0.0
    deploy: DeployParams = field(default_factory=DeployParams)
    chan: ChannelParams = field(default_factory=ChannelParams)
    traffic: TrafficParams = field(default_factory=TrafficParams)
    targets: QosTargets = field(default_factory=QosTargets)


def env_params(cfg: dict) -> EnvParams:
    deploy = DeployParams(
        n_clusters=cfg["deploy.clusters"],
        cluster_min_sep_m=cfg["deploy.cluster_min_sep_m"],
        cluster_sigma_m=cfg["deploy.cluster_sigma_m"],
        body_min_sep_m=cfg["deploy.body_min_sep_m"],
        embb_height_m=cfg["deploy.embb_height_m"],
    )
    chan = ChannelParams(
        fc_ghz=cfg["chan.fc_ghz"],
        noise_figure_db=cfg["chan.noise_figure_db"],
        noise_density_dbm_hz=cfg["chan.noise_density_dbm_hz"],
        macro_tx_dbm=cfg["chan.macro_tx_dbm"],
        ap_tx_dbm=cfg["chan.ap_tx_dbm"],
        se_att=cfg["chan.se_att"],
        se_max=cfg["chan.se_max"],
        sinr_min_db=cfg["chan.sinr_min_db"],
        shadow_sigma_los_db=cfg["chan.shadow_sigma_los_db"],
        shadow_sigma_nlos_db=cfg["chan.shadow_sigma_nlos_db"],
    )
    traffic = TrafficParams(
        video_fps=cfg["traffic.video_fps"],
        frame_bits=cfg["traffic.frame_bits"],
        haptic_pps=cfg["traffic.haptic_pps"],
        haptic_bits=cfg["traffic.haptic_bits"],
        tau_max_ms=cfg["traffic.tau_max_ms"],
        embb_refill_bits=cfg["traffic.embb_refill_bits"],
    )
    targets = QosTargets(
        xr_rate_target_bps=cfg["qos.xr_rate_target_mbps"] * 1e6,
        embb_rate_target_bps=cfg["qos.embb_rate_target_mbps"] * 1e6,
        plr_target=cfg["qos.plr_target"],
        sync_budget_ms=cfg["qos.sync_budget_ms"],
        haptic_delay_target_ms=cfg["qos.haptic_delay_target_ms"],
        tau_max_ms=cfg["traffic.tau_max_ms"],
    )
    return EnvParams(
        tti_ms=cfg["sim.tti_ms"],
        episode_steps=cfg["sim.episode_steps"],
        warmup_steps=cfg["sim.warmup_steps"],
        n_rbg=cfg["sim.n_rbg"],
        n_embb=cfg["sim.embb_users"],
        reuse_mode=cfg["sim.reuse_mode"],
        loss_window_ttis=cfg["reward.loss_window_ttis"],
        reward_clamp_lo=cfg["reward.clamp_lo"],
        reward_clamp_hi=cfg["reward.clamp_hi"],
        deploy=deploy,
        chan=chan,
        traffic=traffic,
        targets=targets,
    )


def sac_params(cfg: dict) -> SacParams:
    return SacParams(
        hidden=tuple(cfg["sac.hidden"]),
        gamma=cfg["sac.gamma"],
        lr=cfg["sac.lr"],
        batch_size=cfg["sac.batch"],
        buffer_capacity=cfg["sac.buffer"],
        tau=cfg["sac.tau"],
        lambda_init=cfg["sac.lambda_init"],
        entropy_target_frac=cfg["sac.entropy_target_frac"],
        update_every=cfg["sac.update_every"],
        warmup_factor=cfg["sac.warmup_factor"],
    )
