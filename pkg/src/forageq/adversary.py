"""Scripted rival policy: chase the nearest visible resource.

Deterministic given the world state except when nothing is visible (or
the only target is the cell already occupied), where it falls back to a
uniform random step. All ties resolve by fixed orderings so the policy
is exactly reproducible: nearest-resource ties go to the lowest
row-major cell, direction ties follow Up, Down, Left, Right.
"""

from __future__ import annotations

import numpy as np

from .env import Action, GridWorld, manhattan


def visible_resources(world: GridWorld, pos: tuple[int, int],
                      radius: int) -> list[tuple[int, int]]:
    """Resource cells inside the square sensing window, row-major order."""
    x, y = pos
    xa, xb = max(0, x - radius), min(world.width, x + radius + 1)
    ya, yb = max(0, y - radius), min(world.height, y + radius + 1)
    ys, xs = np.nonzero(world.resources[ya:yb, xa:xb])
    return [(int(xs[i]) + xa, int(ys[i]) + ya) for i in range(len(ys))]


def nearest_resource(world: GridWorld, pos: tuple[int, int],
                     radius: int) -> tuple[int, int] | None:
    """Closest visible resource by Manhattan distance.

    The scan runs in row-major order and only a strictly smaller
    distance displaces the incumbent, so distance ties resolve to the
    lowest row-major cell.
    """
    best = None
    best_d = None
    for target in visible_resources(world, pos, radius):
        d = manhattan(pos, target)
        if best_d is None or d < best_d:
            best, best_d = target, d
    return best


def greedy_step(pos: tuple[int, int], target: tuple[int, int]) -> Action | None:
    """First distance-reducing action in Up, Down, Left, Right priority."""
    dx = target[0] - pos[0]
    dy = target[1] - pos[1]
    if dy < 0:
        return Action.UP
    if dy > 0:
        return Action.DOWN
    if dx < 0:
        return Action.LEFT
    if dx > 0:
        return Action.RIGHT
    return None


def adversary_action(world: GridWorld, agent_id: int, radius: int,
                     rng: np.random.Generator | None = None) -> Action:
    """Action for one adversary turn.

    Uses the world's own generator for the random-walk fallback unless a
    dedicated one is supplied.
    """
    if rng is None:
        rng = world.rng
    agent = world.agent(agent_id)
    target = nearest_resource(world, agent.position, radius)
    if target is not None:
        step = greedy_step(agent.position, target)
        if step is not None:
            return step
    return Action(int(rng.integers(4)))
