"""Bounded grid world for competitive foraging.

The grid is a rectangle of cells addressed by (x, y) with y growing
downward. Resources occupy cells; agents move orthogonally, bump into
hard borders (the move is consumed but the position is unchanged), and
collect a resource by ending a move on its cell. Every stochastic draw
comes from seeded generators, so a whole episode replays bit-identically
from (config, seed, episode_index).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np


class Team(IntEnum):
    LEADER = 0
    ALLY = 1
    ADVERSARY = 2


class Action(IntEnum):
    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3


# (dx, dy) per action; y grows downward, so UP decrements y.
ACTION_DELTAS = {
    Action.UP: (0, -1),
    Action.DOWN: (0, 1),
    Action.LEFT: (-1, 0),
    Action.RIGHT: (1, 0),
}


@dataclass
class AgentState:
    """Identity, position and per-episode accumulators for one agent."""

    agent_id: int
    team: Team
    position: tuple[int, int]
    collected: int = 0
    reward_total: float = 0.0
    reward_base: float = 0.0
    reward_from_rivals: float = 0.0
    reward_from_teammates: float = 0.0


@dataclass(frozen=True)
class EnvConfig:
    """Static environment parameters for building episode worlds."""

    width: int
    height: int
    density: float
    n_leaders: int = 1
    n_allies: int = 0
    n_adversaries: int = 0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"grid must be at least 1x1, got {self.width}x{self.height}")
        if max(self.width, self.height) < 3:
            raise ValueError("longest grid side must be >= 3")
        if not 0.0 <= self.density <= 1.0:
            raise ValueError(f"density must be in [0, 1], got {self.density}")
        if min(self.n_leaders, self.n_allies, self.n_adversaries) < 0:
            raise ValueError("agent counts must be >= 0")

    @property
    def n_agents(self) -> int:
        return self.n_leaders + self.n_allies + self.n_adversaries

    def roster(self) -> list[Team]:
        """Teams in placement order: leaders, then allies, then adversaries."""
        return (
            [Team.LEADER] * self.n_leaders
            + [Team.ALLY] * self.n_allies
            + [Team.ADVERSARY] * self.n_adversaries
        )


@dataclass
class MoveOutcome:
    position: tuple[int, int]
    collected: bool


class GridWorld:
    """Single source of truth for one episode of simulation.

    `resources` is a (height, width) boolean lattice indexed [y, x].
    Agents are held in id order; `agent(agent_id)` looks one up.
    """

    def __init__(self, config: EnvConfig, resources: np.ndarray,
                 agents: list[AgentState], rng: np.random.Generator,
                 rng_seed: int):
        self.config = config
        self.width = config.width
        self.height = config.height
        self.resources = resources
        self.agents = agents
        self.timestep = 0
        self.rng = rng
        self.rng_seed = rng_seed
        self.initial_resource_count = int(resources.sum())
        self._by_id = {a.agent_id: a for a in agents}

    def agent(self, agent_id: int) -> AgentState:
        try:
            return self._by_id[agent_id]
        except KeyError:
            raise KeyError(f"unknown agent_id {agent_id}") from None

    def in_bounds(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    def remaining_resources(self) -> int:
        return int(self.resources.sum())

    def turn_order(self) -> list[int]:
        """Shuffled agent ids for the current timestep (fresh draw per call)."""
        ids = [a.agent_id for a in self.agents]
        return [ids[i] for i in self.rng.permutation(len(ids))]

    def advance(self) -> None:
        self.timestep += 1

    def friendly_agents(self) -> list[AgentState]:
        return [a for a in self.agents if a.team != Team.ADVERSARY]

    def adversary_agents(self) -> list[AgentState]:
        return [a for a in self.agents if a.team == Team.ADVERSARY]


def manhattan(a: tuple[int, int], b: tuple[int, int]) -> int:
    """L1 distance between two cells."""
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def max_distance(width: int, height: int) -> int:
    """Largest Manhattan distance realizable on the grid (corner to corner)."""
    return (width - 1) + (height - 1)


def _centred_position(rng: np.random.Generator, width: int, height: int,
                      taken: set[tuple[int, int]]) -> tuple[int, int]:
    # Per-axis rounded Gaussian centred on the grid middle, sigma = side/6,
    # redrawn until the cell is inside the grid and unoccupied.
    while True:
        x = int(np.rint(rng.normal(width / 2.0, width / 6.0)))
        y = int(np.rint(rng.normal(height / 2.0, height / 6.0)))
        if 0 <= x < width and 0 <= y < height and (x, y) not in taken:
            return (x, y)


def init_episode(config: EnvConfig, seed: int, episode_index: int) -> GridWorld:
    """Build a fresh world for one episode.

    Each cell independently holds a resource with probability `density`.
    The first leader starts at the exact grid centre on episode 0 and is
    drawn from the centred distribution afterwards, like everyone else.
    Start cells are unique per agent; statistics start zeroed.
    """
    if episode_index < 0:
        raise ValueError("episode_index must be >= 0")
    if config.n_agents > config.width * config.height:
        raise ValueError(
            f"cannot place {config.n_agents} agents on a "
            f"{config.width}x{config.height} grid"
        )
    rng = np.random.default_rng((seed, episode_index))
    resources = rng.random((config.height, config.width)) < config.density

    agents: list[AgentState] = []
    taken: set[tuple[int, int]] = set()
    for agent_id, team in enumerate(config.roster()):
        if team == Team.LEADER and agent_id == 0 and episode_index == 0:
            pos = (config.width // 2, config.height // 2)
            if pos in taken:  # leader is placed first, so never hit
                pos = _centred_position(rng, config.width, config.height, taken)
        else:
            pos = _centred_position(rng, config.width, config.height, taken)
        taken.add(pos)
        agents.append(AgentState(agent_id=agent_id, team=team, position=pos))

    return GridWorld(config, resources, agents, rng, seed)


def step_agent(world: GridWorld, agent_id: int, action: Action) -> MoveOutcome:
    """Move one agent one cell; out-of-grid targets are no-ops.

    Collection is keyed to the destination cell after the move resolves,
    so a wall bump still collects from the cell the agent stays on.
    """
    agent = world.agent(agent_id)
    dx, dy = ACTION_DELTAS[Action(action)]
    x, y = agent.position
    nx, ny = x + dx, y + dy
    if not world.in_bounds(nx, ny):
        nx, ny = x, y
    agent.position = (nx, ny)

    collected = bool(world.resources[ny, nx])
    if collected:
        world.resources[ny, nx] = False
        agent.collected += 1
    return MoveOutcome(position=(nx, ny), collected=collected)


def observe(world: GridWorld, agent_id: int, radius: int) -> np.ndarray:
    """Egocentric (3, 2r+1, 2r+1) binary window centred on the agent.

    Channel 0 marks resources, channel 1 friendly agents other than the
    observer, channel 2 adversaries. Cells outside the grid read 0.
    """
    if radius < 1:
        raise ValueError("radius must be >= 1")
    agent = world.agent(agent_id)
    ax, ay = agent.position
    side = 2 * radius + 1
    obs = np.zeros((3, side, side), dtype=np.uint8)

    x0, y0 = ax - radius, ay - radius
    xa, xb = max(0, x0), min(world.width, ax + radius + 1)
    ya, yb = max(0, y0), min(world.height, ay + radius + 1)
    obs[0, ya - y0:yb - y0, xa - x0:xb - x0] = world.resources[ya:yb, xa:xb]

    for other in world.agents:
        if other.agent_id == agent_id:
            continue
        ox, oy = other.position
        if abs(ox - ax) <= radius and abs(oy - ay) <= radius:
            channel = 2 if other.team == Team.ADVERSARY else 1
            obs[channel, oy - y0, ox - x0] = 1
    return obs
