"""Discrete soft actor-critic over a finite action set.

The actor is a softmax MLP over actions; two independent linear-head critics
(with slowly tracking target copies) estimate per-action soft Q-values. With a
finite action set every expectation over the policy is exact, so no sampling
or reparameterization enters the losses:

* soft state value  V(s) = sum_a pi(a|s) * (min_i Q_i(s,a) - lambda*log pi(a|s))
* critic target     y = r + gamma * (1 - done) * V_target(s')
* critic loss       mean_b (Q(s_b, a_b) - y_b)^2, per critic
* actor loss        mean_b sum_a pi(a|s_b) * (lambda*log pi(a|s_b) - min_i Q_i(s_b,a))
* temperature       gradient descent on log(lambda) with slope (H - H_target)

Updates run once per environment step (configurable thinning) after the
replay buffer holds warmup_factor * batch_size transitions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CheckpointError
from .nn import MLP, Adam, load_arrays, save_arrays

_LOG_FLOOR = 1e-300


@dataclass
class SacParams:
    hidden: tuple[int, ...] = (400, 300, 200, 100)
    gamma: float = 0.9
    lr: float = 1e-4
    batch_size: int = 1024
    buffer_capacity: int = 1_000_000
    tau: float = 0.005
    lambda_init: float = 0.2
    entropy_target_frac: float = 0.6
    update_every: int = 1
    warmup_factor: int = 10


class ReplayBuffer:
    """Fixed-capacity ring buffer with uniform sampling."""

    def __init__(self, capacity: int, obs_dim: int):
        self.capacity = int(capacity)
        self.obs = np.zeros((self.capacity, obs_dim))
        self.next_obs = np.zeros((self.capacity, obs_dim))
        self.actions = np.zeros(self.capacity, dtype=np.int64)
        self.rewards = np.zeros(self.capacity)
        self.dones = np.zeros(self.capacity)
        self.size = 0
        self._pos = 0

    def __len__(self) -> int:
        return self.size

    def add(self, obs, action: int, reward: float, next_obs, done: float) -> None:
        i = self._pos
        self.obs[i] = obs
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_obs[i] = next_obs
        self.dones[i] = done
        self._pos = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator) -> dict:
        idx = rng.integers(0, self.size, size=batch_size)
        return {
            "obs": self.obs[idx],
            "actions": self.actions[idx],
            "rewards": self.rewards[idx],
            "next_obs": self.next_obs[idx],
            "dones": self.dones[idx],
        }


def soft_state_value(probs: np.ndarray, q_values: np.ndarray, lam: float):
    """Exact soft value sum_a p_a * (q_a - lam*log p_a), with 0*log(0) = 0.

    Accepts a single distribution (A,) or a batch (B, A); returns a scalar
    or a (B,) vector accordingly.
    """
    p = np.asarray(probs, dtype=np.float64)
    q = np.asarray(q_values, dtype=np.float64)
    logp = np.log(np.maximum(p, _LOG_FLOOR))
    plogp = np.where(p > 0.0, p * logp, 0.0)
    v = (p * q).sum(axis=-1) - plogp.sum(axis=-1) * lam
    return float(v) if v.ndim == 0 else v


def critic_target(reward, done, next_value, gamma: float):
    """Bootstrapped soft target y = r + gamma * (1 - done) * V(s')."""
    return reward + gamma * (1.0 - done) * next_value


def soft_update(target: MLP, online: MLP, tau: float) -> None:
    """Polyak tracking: target <- (1 - tau) * target + tau * online."""
    tp = target.params()
    op = online.params()
    for name, t in tp.items():
        t += tau * (op[name] - t)


def policy_entropy(probs: np.ndarray) -> np.ndarray:
    """Shannon entropy per row, 0*log(0) = 0."""
    p = np.asarray(probs, dtype=np.float64)
    logp = np.log(np.maximum(p, _LOG_FLOOR))
    return -np.where(p > 0.0, p * logp, 0.0).sum(axis=-1)


@dataclass
class UpdateStats:
    critic1_loss: float
    critic2_loss: float
    actor_loss: float
    lam: float
    entropy: float


class DiscreteSAC:
    """Soft actor-critic agent for a discrete action set."""

    name = "sac"

    def __init__(
        self,
        obs_dim: int,
        n_actions: int,
        params: SacParams,
        rng: np.random.Generator,
    ):
        self.obs_dim = obs_dim
        self.n_actions = n_actions
        self.params = params
        self.rng = rng
        sizes = (obs_dim, *params.hidden, n_actions)
        self.actor = MLP(sizes, head="softmax", rng=rng)
        self.critic1 = MLP(sizes, head="linear", rng=rng)
        self.critic2 = MLP(sizes, head="linear", rng=rng)
        self.target1 = self.critic1.copy()
        self.target2 = self.critic2.copy()
        self.opt_actor = Adam(lr=params.lr)
        self.opt_critic1 = Adam(lr=params.lr)
        self.opt_critic2 = Adam(lr=params.lr)
        self.opt_lam = Adam(lr=params.lr)
        self.log_lam = np.array([math.log(params.lambda_init)])
        self.h_target = params.entropy_target_frac * math.log(n_actions)
        self.buffer = ReplayBuffer(params.buffer_capacity, obs_dim)
        self.update_count = 0
        self._env_steps = 0

    @property
    def lam(self) -> float:
        return float(np.exp(self.log_lam[0]))

    # ---- acting ----

    def action_probs(self, obs) -> np.ndarray:
        return self.actor.forward(np.asarray(obs)[None, :])[0]

    def act(self, obs, greedy: bool = False) -> int:
        probs = self.action_probs(obs)
        if greedy:
            return int(np.argmax(probs))
        p = probs / probs.sum()
        return int(self.rng.choice(self.n_actions, p=p))

    # ---- learning ----

    def record(self, obs, action, reward, next_obs, done) -> UpdateStats | None:
        """Store one transition; run an update when the cadence allows."""
        self.buffer.add(obs, action, reward, next_obs, done)
        self._env_steps += 1
        ready = len(self.buffer) >= self.params.warmup_factor * self.params.batch_size
        if ready and self._env_steps % self.params.update_every == 0:
            return self.update()
        return None

    def update(self) -> UpdateStats:
        p = self.params
        batch = self.buffer.sample(p.batch_size, self.rng)
        s = batch["obs"]
        a = batch["actions"]
        r = batch["rewards"]
        s2 = batch["next_obs"]
        done = batch["dones"]
        bsz = s.shape[0]
        rows = np.arange(bsz)
        lam = self.lam

        # bootstrapped targets from the target critics and current policy
        probs2 = self.actor.forward(s2)
        q_next = np.minimum(self.target1.forward(s2), self.target2.forward(s2))
        v_next = soft_state_value(probs2, q_next, lam)
        y = critic_target(r, done, v_next, p.gamma)

        c_losses = []
        for critic, opt in (
            (self.critic1, self.opt_critic1),
            (self.critic2, self.opt_critic2),
        ):
            q = critic.forward(s)
            err = q[rows, a] - y
            c_losses.append(float(np.mean(err**2)))
            upstream = np.zeros_like(q)
            upstream[rows, a] = 2.0 * err / bsz
            opt.step(critic.params(), critic.backward(upstream))

        # actor step against the freshly updated critics (no grad through them)
        probs = self.actor.forward(s)
        logp = np.log(np.maximum(probs, _LOG_FLOOR))
        q_min = np.minimum(self.critic1.forward(s), self.critic2.forward(s))
        actor_loss = float(np.mean((probs * (lam * logp - q_min)).sum(axis=1)))
        upstream = (lam * (logp + 1.0) - q_min) / bsz
        self.opt_actor.step(self.actor.params(), self.actor.backward(upstream))

        # temperature: push entropy toward the target on the log scale
        entropy = float(policy_entropy(probs).mean())
        self.opt_lam.step(
            {"log_lam": self.log_lam},
            {"log_lam": np.array([entropy - self.h_target])},
        )

        soft_update(self.target1, self.critic1, p.tau)
        soft_update(self.target2, self.critic2, p.tau)
        self.update_count += 1
        return UpdateStats(
            critic1_loss=c_losses[0],
            critic2_loss=c_losses[1],
            actor_loss=actor_loss,
            lam=self.lam,
            entropy=entropy,
        )

    # ---- persistence ----

    def _net_arrays(self) -> dict[str, np.ndarray]:
        arrays: dict[str, np.ndarray] = {"log_lam": self.log_lam}
        nets = {
            "actor": self.actor,
            "critic1": self.critic1,
            "critic2": self.critic2,
            "target1": self.target1,
            "target2": self.target2,
        }
        for prefix, net in nets.items():
            for name, arr in net.params().items():
                arrays[f"{prefix}.{name}"] = arr
        return arrays

    def save_policy(self, path: str) -> None:
        save_arrays(path, self._net_arrays())

    def load_policy(self, path: str) -> None:
        stored = load_arrays(path)
        own = self._net_arrays()
        if set(stored) != set(own):
            raise CheckpointError(
                f"checkpoint {path} does not match this agent's parameter set"
            )
        for name, arr in own.items():
            if stored[name].shape != arr.shape:
                raise CheckpointError(
                    f"checkpoint {path}: shape mismatch for {name} "
                    f"({stored[name].shape} vs {arr.shape})"
                )
            arr[...] = stored[name]
