"""End-of-lifetime model dissemination.

The leader's learned weights are copied to every ally with independent
per-entry Gaussian perturbation, one fresh draw per ally. The leader's
own parameters are never touched, and a zero mutation scale hands over
bit-identical copies.
"""

from __future__ import annotations

import numpy as np

from .nn import Params, copy_params


def mutate_params(params: Params, sigma: float,
                  rng: np.random.Generator) -> Params:
    """Every entry perturbed by sigma * standard normal noise.

    sigma = 0 short-circuits to a plain copy so no floating-point
    round-off (or signed-zero flip) can sneak in.
    """
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0.0:
        return copy_params(params)
    return {k: (v + sigma * rng.standard_normal(v.shape)).astype(v.dtype)
            for k, v in params.items()}


def disseminate(leader_params: Params, n_allies: int, sigma: float,
                rng: np.random.Generator) -> list[Params]:
    """Independent mutated copies of the leader's weights, one per ally."""
    if n_allies < 0:
        raise ValueError("n_allies must be >= 0")
    return [mutate_params(leader_params, sigma, rng) for _ in range(n_allies)]
