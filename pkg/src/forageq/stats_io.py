"""Episode statistics and their delimited on-disk forms.

One CSV row per episode, fixed column order:

    run_id, architecture, lifetime, episode, phase,
    friendly_resources, adversary_resources, win,
    mean_step_seconds, var_step_seconds,
    agent{i}_collected, agent{i}_base, agent{i}_Re, agent{i}_Ra ...

Agent columns cover the friendly team only (leader first), zero-filled
for episodes where an agent was not yet present. Floats are written with
repr so a file parses back to exactly the values that produced it; the
whole file is reproducible byte-for-byte from (config, seed) as long as
timing measurement is off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class AgentTotals:
    """Per-episode accumulators of one friendly agent."""

    collected: int = 0
    base: float = 0.0
    from_rivals: float = 0.0
    from_teammates: float = 0.0

    @property
    def reward_total(self) -> float:
        return self.base + self.from_rivals + self.from_teammates


@dataclass(frozen=True)
class EpisodeStats:
    lifetime: int                   # 1-based block index
    episode: int                    # global 0-based episode index
    phase: str                      # "train" or "eval"
    friendly_resources: int
    adversary_resources: int
    mean_step_seconds: float
    var_step_seconds: float
    per_agent: tuple[AgentTotals, ...]

    def __post_init__(self):
        if self.phase not in ("train", "eval"):
            raise ValueError(f"phase must be train or eval, got {self.phase!r}")
        if sum(a.collected for a in self.per_agent) != self.friendly_resources:
            raise ValueError("per-agent collection does not sum to team total")

    @property
    def win(self) -> bool:
        """Strictly more friendly than adversary collections."""
        return self.friendly_resources > self.adversary_resources


def stats_header(n_agents: int) -> str:
    fixed = ["run_id", "architecture", "lifetime", "episode", "phase",
             "friendly_resources", "adversary_resources", "win",
             "mean_step_seconds", "var_step_seconds"]
    for i in range(n_agents):
        fixed += [f"agent{i}_collected", f"agent{i}_base",
                  f"agent{i}_Re", f"agent{i}_Ra"]
    return ",".join(fixed)


def _row(stats: EpisodeStats, run_id: str, architecture: str,
         n_agents: int) -> str:
    if len(stats.per_agent) > n_agents:
        raise ValueError("episode carries more agents than the file schema")
    cells = [run_id, architecture, str(stats.lifetime), str(stats.episode),
             stats.phase, str(stats.friendly_resources),
             str(stats.adversary_resources), str(int(stats.win)),
             repr(stats.mean_step_seconds), repr(stats.var_step_seconds)]
    padded = stats.per_agent + (AgentTotals(),) * (n_agents - len(stats.per_agent))
    for a in padded:
        cells += [str(a.collected), repr(a.base),
                  repr(a.from_rivals), repr(a.from_teammates)]
    return ",".join(cells)


def write_stats(stats, path, run_id: str, architecture: str,
                n_agents: int) -> None:
    """Header-first CSV, one row per episode, in stream order."""
    if "," in run_id or "," in architecture:
        raise ValueError("run_id and architecture must be comma-free")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(stats_header(n_agents) + "\n")
        for s in stats:
            fh.write(_row(s, run_id, architecture, n_agents) + "\n")


@dataclass(frozen=True)
class StatsFile:
    run_id: str
    architecture: str
    n_agents: int
    episodes: tuple[EpisodeStats, ...]


def read_stats(path) -> StatsFile:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty stats file")
    header = lines[0].split(",")
    if header[:10] != stats_header(0).split(","):
        raise ValueError(f"{path}: unrecognized stats header")
    n_agents = (len(header) - 10) // 4
    if len(header) != 10 + 4 * n_agents:
        raise ValueError(f"{path}: ragged agent columns in header")

    run_id = architecture = None
    episodes = []
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != len(header):
            raise ValueError(f"{path}: row width does not match header")
        if run_id is None:
            run_id, architecture = cells[0], cells[1]
        per_agent = tuple(
            AgentTotals(collected=int(cells[10 + 4 * i]),
                        base=float(cells[11 + 4 * i]),
                        from_rivals=float(cells[12 + 4 * i]),
                        from_teammates=float(cells[13 + 4 * i]))
            for i in range(n_agents))
        stats = EpisodeStats(
            lifetime=int(cells[2]), episode=int(cells[3]), phase=cells[4],
            friendly_resources=int(cells[5]), adversary_resources=int(cells[6]),
            mean_step_seconds=float(cells[8]), var_step_seconds=float(cells[9]),
            per_agent=per_agent)
        if int(cells[7]) != int(stats.win):
            raise ValueError(f"{path}: win flag contradicts resource totals")
        episodes.append(stats)
    return StatsFile(run_id=run_id or "", architecture=architecture or "",
                     n_agents=n_agents, episodes=tuple(episodes))


# -- derived reports ---------------------------------------------------------

ROLE_EXPLORER_ABOVE = 0.65
ROLE_DISRUPTOR_BELOW = 0.35


def role_label(share: float) -> str:
    if share > ROLE_EXPLORER_ABOVE:
        return "explorer"
    if share < ROLE_DISRUPTOR_BELOW:
        return "disruptor"
    return "mixed"


@dataclass(frozen=True)
class AgentBreakdown:
    agent: int
    collected: int
    base: float
    from_rivals: float
    from_teammates: float
    pct_base: float
    pct_Re: float
    pct_Ra: float
    teammate_share: float   # from_teammates / (from_rivals + from_teammates)
    role: str


def breakdown_rows(episodes, n_agents: int) -> list[AgentBreakdown]:
    """Whole-run reward attribution per friendly agent.

    Percentages are of the agent's total reward; a reward-less agent
    reports zero percentages and a neutral 0.5 teammate share.
    """
    rows = []
    for i in range(n_agents):
        collected = sum(s.per_agent[i].collected
                        for s in episodes if i < len(s.per_agent))
        base = math.fsum(s.per_agent[i].base
                         for s in episodes if i < len(s.per_agent))
        rivals = math.fsum(s.per_agent[i].from_rivals
                           for s in episodes if i < len(s.per_agent))
        mates = math.fsum(s.per_agent[i].from_teammates
                          for s in episodes if i < len(s.per_agent))
        total = base + rivals + mates
        if total > 0:
            pct = (100.0 * base / total, 100.0 * rivals / total,
                   100.0 * mates / total)
        else:
            pct = (0.0, 0.0, 0.0)
        shaped = rivals + mates
        share = mates / shaped if shaped > 0 else 0.5
        rows.append(AgentBreakdown(
            agent=i, collected=collected, base=base, from_rivals=rivals,
            from_teammates=mates, pct_base=pct[0], pct_Re=pct[1],
            pct_Ra=pct[2], teammate_share=share, role=role_label(share)))
    return rows


BREAKDOWN_HEADER = ("agent,collected,base,Re,Ra,"
                    "pct_base,pct_Re,pct_Ra,Ra_share,role")


def write_breakdown(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(BREAKDOWN_HEADER + "\n")
        for r in rows:
            fh.write(",".join([
                str(r.agent), str(r.collected), repr(r.base),
                repr(r.from_rivals), repr(r.from_teammates),
                repr(r.pct_base), repr(r.pct_Re), repr(r.pct_Ra),
                repr(r.teammate_share), r.role]) + "\n")


def read_breakdown(path) -> list[AgentBreakdown]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines or lines[0] != BREAKDOWN_HEADER:
        raise ValueError(f"{path}: unrecognized breakdown header")
    out = []
    for ln in lines[1:]:
        c = ln.split(",")
        out.append(AgentBreakdown(
            agent=int(c[0]), collected=int(c[1]), base=float(c[2]),
            from_rivals=float(c[3]), from_teammates=float(c[4]),
            pct_base=float(c[5]), pct_Re=float(c[6]), pct_Ra=float(c[7]),
            teammate_share=float(c[8]), role=c[9]))
    return out


@dataclass(frozen=True)
class EvalSummary:
    """Per-configuration evaluation aggregates (collection and wins)."""

    episodes: int
    friendly_mean: float
    friendly_var: float
    adversary_mean: float
    adversary_var: float
    wins: int


def summarize(episodes) -> EvalSummary:
    rows = list(episodes)
    n = len(rows)
    if n == 0:
        return EvalSummary(0, 0.0, 0.0, 0.0, 0.0, 0)

    def moments(values):
        mean = math.fsum(values) / n
        var = math.fsum((v - mean) ** 2 for v in values) / n
        return mean, var

    f_mean, f_var = moments([s.friendly_resources for s in rows])
    a_mean, a_var = moments([s.adversary_resources for s in rows])
    return EvalSummary(episodes=n, friendly_mean=f_mean, friendly_var=f_var,
                       adversary_mean=a_mean, adversary_var=a_var,
                       wins=sum(1 for s in rows if s.win))


SUMMARY_HEADER = ("config,n_lifetimes,episodes_per_lifetime,seed,"
                  "eval_episodes,friendly_mean,friendly_var,"
                  "adversary_mean,adversary_var,wins")


def write_summary(rows, path) -> None:
    """rows: iterable of (label, n_L, n_E, seed, EvalSummary)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for label, n_l, n_e, seed, s in rows:
            fh.write(",".join([
                label, str(n_l), str(n_e), str(seed), str(s.episodes),
                repr(s.friendly_mean), repr(s.friendly_var),
                repr(s.adversary_mean), repr(s.adversary_var),
                str(s.wins)]) + "\n")
