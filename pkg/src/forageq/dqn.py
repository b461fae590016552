"""Q-learning on top of the network substrate.

One agent owns an online network, a lagged target copy, and a uniform
replay ring. Observations are stored in their compact integer form and
only widened to float at the network boundary. Exploration follows a
per-episode multiplicative epsilon decay with a hard floor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import nn
from .nn import NetworkSpec, Params


@dataclass(frozen=True)
class DQNParams:
    """Learning hyper-parameters; defaults follow the reference setup."""

    lr: float = 0.01
    gamma: float = 0.8
    eps0: float = 1.0
    eps_decay: float = 0.995
    eps_min: float = 0.1
    replay_capacity: int = 10_000
    batch_size: int = 32
    target_sync: int = 250

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError("lr must be > 0")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must be in [0, 1]")
        if not 0.0 <= self.eps0 <= 1.0:
            raise ValueError("eps0 must be in [0, 1]")
        if not 0.0 < self.eps_decay <= 1.0:
            raise ValueError("eps_decay must be in (0, 1]")
        if not 0.0 <= self.eps_min <= self.eps0:
            raise ValueError("eps_min must be in [0, eps0]")
        if self.replay_capacity < 1 or self.batch_size < 1:
            raise ValueError("replay_capacity and batch_size must be >= 1")
        if self.batch_size > self.replay_capacity:
            raise ValueError("batch_size cannot exceed replay_capacity")
        if self.target_sync < 1:
            raise ValueError("target_sync must be >= 1")


def epsilon_at(params: DQNParams, episode_index: int) -> float:
    """Exploration rate for a 0-based episode index: eps0 * decay^t, floored."""
    return max(params.eps_min, params.eps0 * params.eps_decay ** episode_index)


class ReplayBuffer:
    """Fixed-capacity ring of transitions with uniform no-replacement sampling."""

    def __init__(self, capacity: int, obs_shape: tuple[int, ...],
                 rng: np.random.Generator, action_shape: tuple[int, ...] = ()):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.rng = rng
        self.obs = np.zeros((capacity, *obs_shape), dtype=np.uint8)
        self.next_obs = np.zeros((capacity, *obs_shape), dtype=np.uint8)
        self.actions = np.zeros((capacity, *action_shape), dtype=np.int64)
        self.rewards = np.zeros(capacity, dtype=np.float32)
        self.dones = np.zeros(capacity, dtype=bool)
        self.size = 0
        self.cursor = 0

    def __len__(self) -> int:
        return self.size

    def push(self, obs, action, reward, next_obs, done) -> None:
        i = self.cursor
        self.obs[i] = obs
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_obs[i] = next_obs
        self.dones[i] = done
        self.cursor = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size: int):
        if batch_size > self.size:
            raise ValueError("not enough stored transitions to sample")
        idx = self.rng.choice(self.size, size=batch_size, replace=False)
        return (self.obs[idx], self.actions[idx], self.rewards[idx],
                self.next_obs[idx], self.dones[idx])


def td_targets(rewards: np.ndarray, next_q: np.ndarray,
               dones: np.ndarray, gamma: float) -> np.ndarray:
    """Bootstrap targets: r + gamma * max_a' Q(s'), cut to r on terminals."""
    bootstrap = next_q.max(axis=1)
    return rewards + gamma * bootstrap * (~dones)


class DQNAgent:
    """A single learner: epsilon-greedy actor plus replay-driven updates.

    `explore_rng` drives action randomness, `sample_rng` drives minibatch
    selection; splitting them keeps trajectories replayable even if the
    learning cadence changes.
    """

    def __init__(self, spec: NetworkSpec, hp: DQNParams,
                 init_rng: np.random.Generator,
                 explore_rng: np.random.Generator,
                 sample_rng: np.random.Generator,
                 params: Params | None = None):
        self.spec = spec
        self.hp = hp
        self.params = nn.copy_params(params) if params is not None \
            else nn.init_params(spec, init_rng)
        self.target_params = nn.copy_params(self.params)
        self.replay = ReplayBuffer(
            hp.replay_capacity,
            (spec.in_channels, spec.in_height, spec.in_width),
            sample_rng)
        self.explore_rng = explore_rng
        self.epsilon = hp.eps0
        self.learn_steps = 0

    def begin_episode(self, episode_index: int) -> None:
        self.epsilon = epsilon_at(self.hp, episode_index)

    def q_values(self, obs: np.ndarray) -> np.ndarray:
        x = obs.astype(np.float32)[None]
        return nn.forward(self.spec, self.params, x)[0]

    def greedy_action(self, obs: np.ndarray) -> int:
        # ties resolve to the lowest action index
        return int(np.argmax(self.q_values(obs)))

    def act(self, obs: np.ndarray) -> int:
        if self.explore_rng.random() < self.epsilon:
            return int(self.explore_rng.integers(self.spec.n_actions))
        return self.greedy_action(obs)

    def remember(self, obs, action, reward, next_obs, done) -> None:
        self.replay.push(obs, action, reward, next_obs, done)

    def learn(self) -> float | None:
        """One minibatch SGD step; no-op until the buffer can fill a batch."""
        if len(self.replay) < self.hp.batch_size:
            return None
        obs_u8, actions, rewards, next_u8, dones = \
            self.replay.sample(self.hp.batch_size)
        obs = obs_u8.astype(np.float32)
        nxt = next_u8.astype(np.float32)

        next_q = nn.forward(self.spec, self.target_params, nxt)
        targets = td_targets(rewards, next_q, dones, self.hp.gamma)

        pred, cache = nn.forward(self.spec, self.params, obs, want_cache=True)
        batch = np.arange(len(actions))
        taken = pred[batch, actions]
        err = taken - targets
        loss = float(np.mean(err ** 2))

        dout = np.zeros_like(pred)
        dout[batch, actions] = (2.0 / len(actions)) * err
        grads = nn.backward(self.spec, self.params, cache, dout)
        self.params = nn.sgd_step(self.params, grads, self.hp.lr)

        self.learn_steps += 1
        if self.learn_steps % self.hp.target_sync == 0:
            self.target_params = nn.copy_params(self.params)
        return loss
