"""Lifetime/episode/timestep protocol around a single episode engine.

The engine is the only place where agents take turns, rewards are
scored, and per-timestep wall-clock is sampled, so every architecture
(single learning leader, independent learners, joint controller) is
timed across literally the same loop boundaries. Controllers plug into
the engine per agent id and differ only in how they pick actions and
what they learn.

Protocol: training runs n_lifetimes blocks of episodes_per_lifetime
episodes. The first block fields no allies; every later block starts by
handing each ally a freshly mutated copy of the leader's current
parameters. Epsilon decays per global episode across the whole run.
Evaluation freezes every friendly policy (epsilon 0, no learning) for
n_eval further episodes.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import nn
from .adversary import adversary_action
from .config import RunConfig, with_overrides
from .dqn import DQNAgent
from .env import GridWorld, Team, init_episode, max_distance, observe, step_agent
from .nn import Params
from .reward import ZERO_REWARD, collection_reward
from .sharing import disseminate
from .stats_io import (
    AgentTotals,
    EpisodeStats,
    breakdown_rows,
    summarize,
    write_breakdown,
    write_stats,
    write_summary,
)

# Harness RNG streams are namespaced away from the per-episode world
# streams (which hash (seed, episode_index)) by this sentinel.
_STREAM_SALT = 2 ** 32
_INIT, _EXPLORE, _SAMPLE, _MUTATE, _SWEEP = range(5)


def rng_stream(seed: int, *tags: int) -> np.random.Generator:
    return np.random.default_rng((seed, _STREAM_SALT, *tags))


def derive_seed(seed: int, index: int) -> int:
    """Independent 32-bit child seed for an isolated sub-run."""
    ss = np.random.SeedSequence((seed, _STREAM_SALT, _SWEEP, index))
    return int(ss.generate_state(1)[0])


class Controller:
    """Per-team plug-in for the episode engine; defaults do nothing."""

    def begin_episode(self, world: GridWorld, episode_index: int) -> None:
        pass

    def begin_timestep(self, world: GridWorld) -> None:
        pass

    def action_for(self, world: GridWorld, agent_id: int) -> int:
        raise NotImplementedError

    def note_reward(self, world: GridWorld, agent_id: int,
                    reward: float) -> None:
        pass

    def end_timestep(self, world: GridWorld) -> None:
        pass

    def end_episode(self, world: GridWorld) -> None:
        pass


class AdversaryController(Controller):
    def __init__(self, radius: int):
        self.radius = radius

    def action_for(self, world, agent_id):
        return adversary_action(world, agent_id, self.radius)


class FrozenTeamController(Controller):
    """Exploit-only agents: per-agent parameters, pure greedy actions."""

    def __init__(self, spec, models: dict[int, Params], radius: int):
        self.spec = spec
        self.models = models
        self.radius = radius

    def action_for(self, world, agent_id):
        obs = observe(world, agent_id, self.radius)
        x = obs.astype(np.float32)[None]
        q = nn.forward(self.spec, self.models[agent_id], x)[0]
        return int(np.argmax(q))


class LearningTeamController(Controller):
    """Independent DQN learners, one per owned agent id.

    Each agent's transition completes at its next decision point, so the
    stored next state reflects every interleaved move by other agents.
    The final transition of an episode closes against the end-of-episode
    observation with the terminal flag set.
    """

    def __init__(self, agents: dict[int, DQNAgent], radius: int):
        self.agents = agents
        self.radius = radius
        self._pending: dict[int, tuple] = {}

    def begin_episode(self, world, episode_index):
        for agent in self.agents.values():
            agent.begin_episode(episode_index)
        self._pending = {}

    def action_for(self, world, agent_id):
        obs = observe(world, agent_id, self.radius)
        learner = self.agents[agent_id]
        if agent_id in self._pending:
            s, a, r = self._pending[agent_id]
            learner.remember(s, a, r, obs, False)
        action = learner.act(obs)
        self._pending[agent_id] = (obs, action, 0.0)
        return action

    def note_reward(self, world, agent_id, reward):
        s, a, _ = self._pending[agent_id]
        self._pending[agent_id] = (s, a, reward)

    def end_timestep(self, world):
        for agent_id in self.agents:
            self.agents[agent_id].learn()

    def end_episode(self, world):
        for agent_id, (s, a, r) in self._pending.items():
            final_obs = observe(world, agent_id, self.radius)
            self.agents[agent_id].remember(s, a, r, final_obs, True)
        self._pending = {}


@dataclass(frozen=True)
class EpisodeSetup:
    """Everything the engine needs beyond the world itself."""

    owners: dict[int, Controller]
    controllers: tuple[Controller, ...]
    lifetime: int
    episode: int
    phase: str
    n_agent_slots: int
    measure_timing: bool


def run_episode(world: GridWorld, setup: EpisodeSetup,
                n_timesteps: int, reward_params) -> EpisodeStats:
    """Run one full episode and aggregate its statistics.

    Per timestep: every controller prepares, agents act one by one in
    the world's shuffled order, then controllers learn. A collection by
    a friendly agent is scored against everyone's position at that
    instant; adversary collections only count resources. Timing wraps
    the whole timestep including learning, training phase only.
    """
    d_max = max_distance(world.width, world.height)
    timed = setup.measure_timing and setup.phase == "train"
    samples = np.zeros(n_timesteps) if timed else None

    for ctl in setup.controllers:
        ctl.begin_episode(world, setup.episode)

    friendly = world.friendly_agents()
    adversaries = world.adversary_agents()
    for t in range(n_timesteps):
        t0 = time.perf_counter() if timed else 0.0
        for ctl in setup.controllers:
            ctl.begin_timestep(world)
        for agent_id in world.turn_order():
            ctl = setup.owners[agent_id]
            action = ctl.action_for(world, agent_id)
            outcome = step_agent(world, agent_id, action)
            agent = world.agent(agent_id)
            if agent.team != Team.ADVERSARY:
                if outcome.collected:
                    teammates = [a.position for a in friendly
                                 if a.agent_id != agent_id]
                    rivals = [a.position for a in adversaries]
                    got = collection_reward(True, agent.position, teammates,
                                            rivals, d_max, reward_params)
                else:
                    got = ZERO_REWARD
                agent.reward_total += got.total
                agent.reward_base += got.base
                agent.reward_from_rivals += got.from_rivals
                agent.reward_from_teammates += got.from_teammates
                ctl.note_reward(world, agent_id, got.total)
        world.advance()
        for ctl in setup.controllers:
            ctl.end_timestep(world)
        if timed:
            samples[t] = time.perf_counter() - t0
    for ctl in setup.controllers:
        ctl.end_episode(world)

    per_agent = tuple(
        AgentTotals(collected=a.collected, base=a.reward_base,
                    from_rivals=a.reward_from_rivals,
                    from_teammates=a.reward_from_teammates)
        for a in friendly)
    per_agent += (AgentTotals(),) * (setup.n_agent_slots - len(per_agent))
    return EpisodeStats(
        lifetime=setup.lifetime, episode=setup.episode, phase=setup.phase,
        friendly_resources=sum(a.collected for a in friendly),
        adversary_resources=sum(a.collected for a in adversaries),
        mean_step_seconds=float(samples.mean()) if timed else 0.0,
        var_step_seconds=float(samples.var()) if timed else 0.0,
        per_agent=per_agent)


@dataclass
class TrainResult:
    leader_params: Params
    ally_params: list[Params]
    stats: list[EpisodeStats]


def _leader_setup(config: RunConfig, leader_ctl, ally_params, spec,
                  lifetime, episode, phase):
    """Wire controllers for one episode of the leader architecture."""
    n_allies = len(ally_params)
    owners: dict[int, Controller] = {0: leader_ctl}
    controllers = [leader_ctl]
    if n_allies:
        allies = FrozenTeamController(
            spec, {1 + i: p for i, p in enumerate(ally_params)},
            config.radius)
        controllers.append(allies)
        for i in range(n_allies):
            owners[1 + i] = allies
    rivals = AdversaryController(config.radius)
    controllers.append(rivals)
    for i in range(config.n_adversaries):
        owners[1 + n_allies + i] = rivals
    return EpisodeSetup(owners=owners, controllers=tuple(controllers),
                        lifetime=lifetime, episode=episode, phase=phase,
                        n_agent_slots=1 + config.n_allies,
                        measure_timing=config.measure_timing)


def make_learner(config: RunConfig, spec, agent_index: int = 0,
                 params: Params | None = None) -> DQNAgent:
    """DQN agent on its own RNG streams, namespaced by agent index."""
    return DQNAgent(spec, config.dqn_params(),
                    init_rng=rng_stream(config.seed, _INIT, agent_index),
                    explore_rng=rng_stream(config.seed, _EXPLORE, agent_index),
                    sample_rng=rng_stream(config.seed, _SAMPLE, agent_index),
                    params=params)


def run_training(config: RunConfig) -> TrainResult:
    """Full training protocol for the single learning leader."""
    spec = config.network_spec()
    agent = make_learner(config, spec)
    leader_ctl = LearningTeamController({0: agent}, config.radius)
    mutate_rng = rng_stream(config.seed, _MUTATE)

    ally_params: list[Params] = []
    stats: list[EpisodeStats] = []
    episode = 0
    for lifetime in range(1, config.n_lifetimes + 1):
        env_cfg = config.env_config(n_allies=len(ally_params))
        for _ in range(config.episodes_per_lifetime):
            world = init_episode(env_cfg, config.seed, episode)
            setup = _leader_setup(config, leader_ctl, ally_params, spec,
                                  lifetime, episode, "train")
            stats.append(run_episode(world, setup, config.timesteps,
                                     config.reward_params()))
            episode += 1
        if lifetime < config.n_lifetimes and config.n_allies > 0:
            ally_params = disseminate(agent.params, config.n_allies,
                                      config.sigma_mut, mutate_rng)
    return TrainResult(leader_params=agent.params, ally_params=ally_params,
                       stats=stats)


def run_evaluation(leader_params: Params, ally_params: list[Params],
                   config: RunConfig,
                   start_episode: int | None = None) -> list[EpisodeStats]:
    """Exploit-only episodes: every friendly policy greedy, no learning."""
    spec = config.network_spec()
    if start_episode is None:
        start_episode = config.total_training_episodes
    n_allies = len(ally_params)
    models = {0: leader_params}
    models.update({1 + i: p for i, p in enumerate(ally_params)})
    team = FrozenTeamController(spec, models, config.radius)
    rivals = AdversaryController(config.radius)
    owners: dict[int, Controller] = {i: team for i in range(1 + n_allies)}
    for i in range(config.n_adversaries):
        owners[1 + n_allies + i] = rivals

    env_cfg = config.env_config(n_allies=n_allies)
    stats = []
    for k in range(config.n_eval):
        episode = start_episode + k
        world = init_episode(env_cfg, config.seed, episode)
        setup = EpisodeSetup(owners=owners, controllers=(team, rivals),
                             lifetime=config.n_lifetimes, episode=episode,
                             phase="eval", n_agent_slots=1 + config.n_allies,
                             measure_timing=config.measure_timing)
        stats.append(run_episode(world, setup, config.timesteps,
                                 config.reward_params()))
    return stats


def run_full(config: RunConfig) -> tuple[TrainResult, list[EpisodeStats]]:
    """Train then evaluate with the resulting models."""
    trained = run_training(config)
    eval_stats = run_evaluation(trained.leader_params, trained.ally_params,
                                config)
    return trained, eval_stats


def save_run(out_dir, stats, param_sets: dict[str, Params], run_id: str,
             architecture: str = "single") -> None:
    """Persist one run: stats CSV, reward breakdown, checkpoints."""
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = list(stats)
    n_agents = max((len(s.per_agent) for s in rows), default=0)
    write_stats(rows, out_dir / "stats.csv", run_id, architecture, n_agents)
    write_breakdown(breakdown_rows(rows, n_agents),
                    out_dir / "breakdown.csv")
    for name, params in param_sets.items():
        nn.save_params(out_dir / f"{name}.fsqn", params)


def leader_param_sets(result: TrainResult) -> dict[str, Params]:
    """Checkpoint naming for the leader architecture's model files."""
    named = {"leader": result.leader_params}
    named.update({f"ally{i}": p for i, p in enumerate(result.ally_params)})
    return named


def run_sweep(config: RunConfig, pairs: list[tuple[int, int]],
              out_dir) -> list[tuple]:
    """Train+eval once per (n_lifetimes, episodes_per_lifetime) pair.

    Every pair must keep the base config's total episode budget. Each
    run gets its own derived seed and output subdirectory; the summary
    rows (and summary.csv) carry the evaluation aggregates.
    """
    total = config.total_training_episodes
    for n_l, n_e in pairs:
        if n_l * n_e != total:
            raise ValueError(
                f"configuration {n_l}x{n_e} changes the episode budget "
                f"({n_l * n_e} != {total})")
    out_dir.mkdir(parents=True, exist_ok=True)
    summary_rows = []
    for index, (n_l, n_e) in enumerate(pairs):
        seed = derive_seed(config.seed, index)
        sub = with_overrides(config, n_lifetimes=n_l,
                             episodes_per_lifetime=n_e, seed=seed)
        trained, eval_stats = run_full(sub)
        label = f"L{n_l}xE{n_e}"
        save_run(out_dir / label, trained.stats + eval_stats,
                 leader_param_sets(trained), run_id=f"single-{label}-s{seed}")
        summary_rows.append((label, n_l, n_e, seed, summarize(eval_stats)))
    write_summary(summary_rows, out_dir / "summary.csv")
    return summary_rows
