"""Collection-gated reward with social distance shaping.

A collecting agent earns the base value scaled by where everyone else
stands: adversaries contribute more the closer they are (snatching food
from under a rival), teammates contribute more the farther away they are
(spreading the team out). Nothing is earned on steps without a
collection, so both shaping terms are multiplicative with the base.
"""

from __future__ import annotations

from dataclasses import dataclass

from .env import manhattan


@dataclass(frozen=True)
class RewardParams:
    collect_reward: float = 1.0
    w_e: float = 0.5
    w_a: float = 0.5

    def __post_init__(self):
        if self.collect_reward < 0:
            raise ValueError("collect_reward must be >= 0")
        if self.w_e < 0 or self.w_a < 0:
            raise ValueError("shaping weights must be >= 0")


@dataclass(frozen=True)
class RewardBreakdown:
    """Total plus its three additive parts (base + rival + teammate shaping)."""

    total: float
    base: float
    from_rivals: float
    from_teammates: float


ZERO_REWARD = RewardBreakdown(0.0, 0.0, 0.0, 0.0)


def rival_proximity(collector: tuple[int, int],
                    rivals: list[tuple[int, int]], d_max: int) -> float:
    """Sum of (1 - d/D) over rival positions; larger when rivals crowd in."""
    return sum(1.0 - manhattan(collector, p) / d_max for p in rivals)


def teammate_spread(collector: tuple[int, int],
                    teammates: list[tuple[int, int]], d_max: int) -> float:
    """Sum of d/D over teammate positions; larger when the team disperses."""
    return sum(manhattan(collector, p) / d_max for p in teammates)


def collection_reward(collected: bool, collector: tuple[int, int],
                      teammates: list[tuple[int, int]],
                      rivals: list[tuple[int, int]], d_max: int,
                      params: RewardParams) -> RewardBreakdown:
    """Reward for one agent's move, evaluated after the move resolves.

    `teammates` excludes the collector itself. Positions of all agents
    are their end-of-move cells at the moment of collection. With no
    collection every component is exactly zero.
    """
    if not collected:
        return ZERO_REWARD
    if d_max < 1:
        raise ValueError("d_max must be >= 1")
    base = params.collect_reward
    from_rivals = base * params.w_e * rival_proximity(collector, rivals, d_max)
    from_teammates = base * params.w_a * teammate_spread(collector, teammates, d_max)
    return RewardBreakdown(
        total=base + from_rivals + from_teammates,
        base=base,
        from_rivals=from_rivals,
        from_teammates=from_teammates,
    )
