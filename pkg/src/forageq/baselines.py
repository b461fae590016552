"""Comparison architectures trained under the leader's exact conditions.

Both baselines reuse the shared episode engine, so environment settings,
episode budgets and timing instrumentation are identical to the
single-leader runs; only the controllers differ.

Independent learners ("marl"): k agents, each with a private network,
replay memory and epsilon schedule; nothing is ever shared.

Joint controller ("central"): one network sees all k observations as
stacked channels and owns one 4-value Q-head per agent; one replay
memory stores joint transitions whose reward is the team sum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import nn
from .config import RunConfig
from .dqn import ReplayBuffer, epsilon_at, td_targets
from .env import init_episode, observe
from .nn import Params
from .orchestrator import (
    AdversaryController,
    Controller,
    EpisodeSetup,
    FrozenTeamController,
    LearningTeamController,
    _EXPLORE,
    _INIT,
    _SAMPLE,
    make_learner,
    rng_stream,
    run_episode,
)
from .stats_io import EpisodeStats


def _lifetime_of(config: RunConfig, episode: int) -> int:
    """Block label matching the leader architecture's lifetime column."""
    if episode >= config.total_training_episodes:
        return config.n_lifetimes
    return episode // config.episodes_per_lifetime + 1


def _team_setup(config: RunConfig, k: int, team_ctl: Controller,
                lifetime: int, episode: int, phase: str) -> EpisodeSetup:
    rivals = AdversaryController(config.radius)
    owners: dict[int, Controller] = {i: team_ctl for i in range(k)}
    for i in range(config.n_adversaries):
        owners[k + i] = rivals
    return EpisodeSetup(owners=owners, controllers=(team_ctl, rivals),
                        lifetime=lifetime, episode=episode, phase=phase,
                        n_agent_slots=k,
                        measure_timing=config.measure_timing)


def _run_team_phase(config: RunConfig, k: int, team_ctl: Controller,
                    first_episode: int, n_episodes: int,
                    phase: str) -> list[EpisodeStats]:
    env_cfg = config.env_config(n_allies=0, n_leaders=k)
    stats = []
    for offset in range(n_episodes):
        episode = first_episode + offset
        world = init_episode(env_cfg, config.seed, episode)
        setup = _team_setup(config, k, team_ctl,
                            _lifetime_of(config, episode), episode, phase)
        stats.append(run_episode(world, setup, config.timesteps,
                                 config.reward_params()))
    return stats


# -- independent learners ----------------------------------------------------

@dataclass
class MarlResult:
    agent_params: list[Params]
    stats: list[EpisodeStats]


def marl_train(config: RunConfig) -> MarlResult:
    """k independent learners over the full training budget."""
    k = config.marl_k
    spec = config.network_spec()
    agents = {i: make_learner(config, spec, agent_index=i) for i in range(k)}
    team = LearningTeamController(agents, config.radius)
    stats = _run_team_phase(config, k, team, 0,
                            config.total_training_episodes, "train")
    return MarlResult(agent_params=[agents[i].params for i in range(k)],
                      stats=stats)


def marl_evaluate(agent_params: list[Params], config: RunConfig,
                  start_episode: int | None = None) -> list[EpisodeStats]:
    k = len(agent_params)
    spec = config.network_spec()
    team = FrozenTeamController(spec, dict(enumerate(agent_params)),
                                config.radius)
    if start_episode is None:
        start_episode = config.total_training_episodes
    return _run_team_phase(config, k, team, start_episode,
                           config.n_eval, "eval")


def run_marl_full(config: RunConfig) -> tuple[MarlResult, list[EpisodeStats]]:
    result = marl_train(config)
    return result, marl_evaluate(result.agent_params, config)


# -- joint controller --------------------------------------------------------

class CentralAgent:
    """One network controlling k agents through per-agent Q-heads.

    Output q (4k,) is read as k blocks of four; action selection and the
    TD backup both work per block, with the joint transition's summed
    reward feeding every head.
    """

    def __init__(self, k: int, spec, hp, init_rng, explore_rng, sample_rng):
        if spec.n_actions != 4 * k:
            raise ValueError("central network must carry 4 outputs per agent")
        self.k = k
        self.spec = spec
        self.hp = hp
        self.params = nn.init_params(spec, init_rng)
        self.target_params = nn.copy_params(self.params)
        self.replay = ReplayBuffer(
            hp.replay_capacity,
            (spec.in_channels, spec.in_height, spec.in_width),
            sample_rng, action_shape=(k,))
        self.explore_rng = explore_rng
        self.epsilon = hp.eps0
        self.learn_steps = 0

    def begin_episode(self, episode_index: int) -> None:
        self.epsilon = epsilon_at(self.hp, episode_index)

    def head_q(self, joint_obs: np.ndarray) -> np.ndarray:
        x = joint_obs.astype(np.float32)[None]
        return nn.forward(self.spec, self.params, x)[0].reshape(self.k, 4)

    def select_actions(self, joint_obs: np.ndarray) -> np.ndarray:
        """Per-head epsilon-greedy over one joint observation."""
        q = self.head_q(joint_obs)
        actions = np.empty(self.k, dtype=np.int64)
        for head in range(self.k):
            if self.explore_rng.random() < self.epsilon:
                actions[head] = self.explore_rng.integers(4)
            else:
                actions[head] = int(np.argmax(q[head]))
        return actions

    def greedy_actions(self, joint_obs: np.ndarray) -> np.ndarray:
        return self.head_q(joint_obs).argmax(axis=1)

    def remember(self, joint_obs, actions, reward, next_obs, done) -> None:
        self.replay.push(joint_obs, actions, reward, next_obs, done)

    def learn(self) -> float | None:
        if len(self.replay) < self.hp.batch_size:
            return None
        obs_u8, actions, rewards, next_u8, dones = \
            self.replay.sample(self.hp.batch_size)
        obs = obs_u8.astype(np.float32)
        nxt = next_u8.astype(np.float32)
        batch = len(actions)

        # one TD backup per head, all sharing the joint summed reward
        next_q = nn.forward(self.spec, self.target_params, nxt)
        targets = td_targets(np.repeat(rewards, self.k),
                             next_q.reshape(batch * self.k, 4),
                             np.repeat(dones, self.k),
                             self.hp.gamma).reshape(batch, self.k)

        pred, cache = nn.forward(self.spec, self.params, obs, want_cache=True)
        heads = pred.reshape(batch, self.k, 4)
        rows = np.arange(batch)[:, None]
        cols = np.arange(self.k)[None, :]
        taken = heads[rows, cols, actions]
        err = taken - targets
        loss = float(np.mean(err ** 2))

        dheads = np.zeros_like(heads)
        dheads[rows, cols, actions] = (2.0 / err.size) * err
        grads = nn.backward(self.spec, self.params, cache,
                            dheads.reshape(batch, -1))
        self.params = nn.sgd_step(self.params, grads, self.hp.lr)
        self.learn_steps += 1
        if self.learn_steps % self.hp.target_sync == 0:
            self.target_params = nn.copy_params(self.params)
        return loss


class CentralController(Controller):
    """Feeds the joint agent stacked observations taken at timestep start."""

    def __init__(self, agent: CentralAgent, radius: int,
                 frozen: bool = False):
        self.agent = agent
        self.radius = radius
        self.frozen = frozen
        self._actions = None
        self._pending = None  # (joint_obs, actions, summed reward)

    def _stack(self, world) -> np.ndarray:
        return np.concatenate(
            [observe(world, i, self.radius) for i in range(self.agent.k)])

    def begin_episode(self, world, episode_index):
        if not self.frozen:
            self.agent.begin_episode(episode_index)
        self._pending = None

    def begin_timestep(self, world):
        joint = self._stack(world)
        if self.frozen:
            self._actions = self.agent.greedy_actions(joint)
            return
        if self._pending is not None:
            s, a, r = self._pending
            self.agent.remember(s, a, r, joint, False)
        self._actions = self.agent.select_actions(joint)
        self._pending = (joint, self._actions, 0.0)

    def action_for(self, world, agent_id):
        return int(self._actions[agent_id])

    def note_reward(self, world, agent_id, reward):
        if self._pending is not None:
            s, a, r = self._pending
            self._pending = (s, a, r + reward)

    def end_timestep(self, world):
        if not self.frozen:
            self.agent.learn()

    def end_episode(self, world):
        if self._pending is not None:
            s, a, r = self._pending
            self.agent.remember(s, a, r, self._stack(world), True)
            self._pending = None


@dataclass
class CentralResult:
    joint_params: Params
    stats: list[EpisodeStats]


def make_central_agent(config: RunConfig, k: int | None = None,
                       params: Params | None = None) -> CentralAgent:
    k = config.marl_k if k is None else k
    agent = CentralAgent(k, config.network_spec(n_controlled=k),
                         config.dqn_params(),
                         init_rng=rng_stream(config.seed, _INIT, 0),
                         explore_rng=rng_stream(config.seed, _EXPLORE, 0),
                         sample_rng=rng_stream(config.seed, _SAMPLE, 0))
    if params is not None:
        agent.params = nn.copy_params(params)
        agent.target_params = nn.copy_params(params)
    return agent


def central_train(config: RunConfig) -> CentralResult:
    """One joint network controlling the whole friendly team."""
    k = config.marl_k
    agent = make_central_agent(config, k)
    team = CentralController(agent, config.radius)
    stats = _run_team_phase(config, k, team, 0,
                            config.total_training_episodes, "train")
    return CentralResult(joint_params=agent.params, stats=stats)


def central_evaluate(joint_params: Params, config: RunConfig,
                     start_episode: int | None = None) -> list[EpisodeStats]:
    k = config.marl_k
    agent = make_central_agent(config, k, params=joint_params)
    team = CentralController(agent, config.radius, frozen=True)
    if start_episode is None:
        start_episode = config.total_training_episodes
    return _run_team_phase(config, k, team, start_episode,
                           config.n_eval, "eval")


def run_central_full(config: RunConfig) -> tuple[CentralResult,
                                                 list[EpisodeStats]]:
    result = central_train(config)
    return result, central_evaluate(result.joint_params, config)


# -- persistence naming ------------------------------------------------------

def marl_param_sets(result: MarlResult) -> dict[str, Params]:
    return {f"agent{i}": p for i, p in enumerate(result.agent_params)}


def central_param_sets(result: CentralResult) -> dict[str, Params]:
    return {"joint": result.joint_params}
