"""Run configuration: documented key=value files over tabled defaults.

An empty file (or no file) yields the reference setup: 100x100 grid,
density 0.1, 1 leader + 4 allies vs 5 adversaries, sensing radius 10,
lr 0.01, gamma 0.8, epsilon from 1.0 to 0.1 at 0.995 per episode, and a
10-lifetimes x 40-episodes protocol. Every key is validated with an
error message naming the offending key, and `dumps(loads(text))` parses
back to an equal config.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from .dqn import DQNParams
from .env import EnvConfig
from .nn import NetworkSpec
from .reward import RewardParams


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    # environment
    grid_width: int = 100
    grid_height: int = 100
    density: float = 0.1
    n_allies: int = 4
    n_adversaries: int = 5
    radius: int = 10
    # learning
    lr: float = 0.01
    gamma: float = 0.8
    eps0: float = 1.0
    eps_decay: float = 0.995
    eps_min: float = 0.1
    replay_capacity: int = 10_000
    batch_size: int = 32
    target_sync: int = 250
    # reward
    collect_reward: float = 1.0
    w_e: float = 0.5
    w_a: float = 0.5
    # sharing
    sigma_mut: float = 0.01
    # protocol
    n_lifetimes: int = 10
    episodes_per_lifetime: int = 40
    timesteps: int = 100
    n_eval: int = 50
    seed: int = 0
    # network
    conv_channels: tuple[int, ...] = (16, 32)
    hidden: tuple[int, ...] = (128,)
    kernel: int = 3
    # baselines
    marl_agents: int = 0  # 0 = match single-architecture headcount
    # instrumentation; off makes emitted files bit-reproducible
    measure_timing: bool = True

    def __post_init__(self):
        checks = [
            ("grid_width", self.grid_width >= 1),
            ("grid_height", self.grid_height >= 1),
            ("grid_width", max(self.grid_width, self.grid_height) >= 3),
            ("density", 0.0 <= self.density <= 1.0),
            ("n_allies", self.n_allies >= 0),
            ("n_adversaries", self.n_adversaries >= 0),
            ("radius", self.radius >= 1),
            ("lr", self.lr > 0),
            ("gamma", 0.0 <= self.gamma <= 1.0),
            ("eps0", 0.0 <= self.eps0 <= 1.0),
            ("eps_decay", 0.0 < self.eps_decay <= 1.0),
            ("eps_min", 0.0 <= self.eps_min <= self.eps0),
            ("replay_capacity", self.replay_capacity >= 1),
            ("batch_size", 1 <= self.batch_size <= self.replay_capacity),
            ("target_sync", self.target_sync >= 1),
            ("collect_reward", self.collect_reward > 0),
            ("w_e", self.w_e >= 0),
            ("w_a", self.w_a >= 0),
            ("sigma_mut", self.sigma_mut >= 0),
            ("n_lifetimes", self.n_lifetimes >= 1),
            ("episodes_per_lifetime", self.episodes_per_lifetime >= 1),
            ("timesteps", self.timesteps >= 1),
            ("n_eval", self.n_eval >= 1),
            ("seed", 0 <= self.seed < 2 ** 63),
            ("conv_channels", all(c >= 1 for c in self.conv_channels)),
            ("hidden", all(h >= 1 for h in self.hidden)),
            ("kernel", self.kernel >= 1 and self.kernel % 2 == 1),
            ("marl_agents", self.marl_agents >= 0),
        ]
        for key, ok in checks:
            if not ok:
                raise ConfigError(
                    f"{key} out of range: {getattr(self, key)!r}")

    # -- derived views -------------------------------------------------------

    @property
    def total_training_episodes(self) -> int:
        return self.n_lifetimes * self.episodes_per_lifetime

    @property
    def marl_k(self) -> int:
        """Learner count for the independent-learners baseline."""
        return self.marl_agents if self.marl_agents > 0 else 1 + self.n_allies

    def env_config(self, n_allies: int | None = None,
                   n_leaders: int = 1) -> EnvConfig:
        return EnvConfig(
            width=self.grid_width, height=self.grid_height,
            density=self.density, n_leaders=n_leaders,
            n_allies=self.n_allies if n_allies is None else n_allies,
            n_adversaries=self.n_adversaries)

    def dqn_params(self) -> DQNParams:
        return DQNParams(
            lr=self.lr, gamma=self.gamma, eps0=self.eps0,
            eps_decay=self.eps_decay, eps_min=self.eps_min,
            replay_capacity=self.replay_capacity,
            batch_size=self.batch_size, target_sync=self.target_sync)

    def reward_params(self) -> RewardParams:
        return RewardParams(collect_reward=self.collect_reward,
                            w_e=self.w_e, w_a=self.w_a)

    def network_spec(self, n_controlled: int = 1) -> NetworkSpec:
        """Network for `n_controlled` jointly controlled agents.

        Observation channels stack (3 per agent) and the output carries
        four Q-values per agent as independent heads.
        """
        side = 2 * self.radius + 1
        return NetworkSpec(
            in_channels=3 * n_controlled, in_height=side, in_width=side,
            conv_channels=self.conv_channels, kernel=self.kernel,
            hidden=self.hidden, n_actions=4 * n_controlled)


_BOOL_WORDS = {"true": True, "false": False}


def _parse_value(key: str, text: str, kind):
    try:
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if kind == "bool":
            if text.lower() not in _BOOL_WORDS:
                raise ValueError
            return _BOOL_WORDS[text.lower()]
        if kind == "ints":
            if text.strip() == "":
                return ()
            return tuple(int(part.strip()) for part in text.split(","))
    except ValueError:
        raise ConfigError(
            f"{key} has a malformed value {text!r} (expected {kind})") from None
    raise AssertionError(kind)


def _field_kinds() -> dict[str, str]:
    kinds = {}
    for f in fields(RunConfig):
        if f.type == "int":
            kinds[f.name] = "int"
        elif f.type == "float":
            kinds[f.name] = "float"
        elif f.type == "bool":
            kinds[f.name] = "bool"
        else:
            kinds[f.name] = "ints"
    return kinds


FIELD_KINDS = _field_kinds()


def loads(text: str) -> RunConfig:
    """Parse key = value lines; '#' starts a comment, blanks are ignored."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno} is not a key = value pair: {raw!r}")
        key, _, rhs = line.partition("=")
        key = key.strip()
        if key not in FIELD_KINDS:
            raise ConfigError(f"unknown key {key!r} on line {lineno}")
        if key in values:
            raise ConfigError(f"duplicate key {key!r} on line {lineno}")
        values[key] = _parse_value(key, rhs.strip(), FIELD_KINDS[key])
    return RunConfig(**values)


def dumps(config: RunConfig) -> str:
    lines = []
    for f in fields(RunConfig):
        value = getattr(config, f.name)
        if FIELD_KINDS[f.name] == "bool":
            text = "true" if value else "false"
        elif FIELD_KINDS[f.name] == "ints":
            text = ",".join(str(v) for v in value)
        else:
            text = repr(value)
        lines.append(f"{f.name} = {text}")
    return "\n".join(lines) + "\n"


def load_config(path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    return loads(text)


def save_config(config: RunConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(config))


def with_overrides(config: RunConfig, **kw) -> RunConfig:
    """Functional update that re-runs validation."""
    return replace(config, **kw)
