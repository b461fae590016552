"""Reader for the per-episode stats CSVs emitted by simulator runs.

The file contract: a header line of ten fixed columns

    run_id, architecture, lifetime, episode, phase,
    friendly_resources, adversary_resources, win,
    mean_step_seconds, var_step_seconds

followed by four columns per agent slot
(``agent{i}_collected``, ``agent{i}_base``, ``agent{i}_Re``,
``agent{i}_Ra``), then one data row per episode.  A header with no data
rows is a valid, empty run.  This module re-implements the parse from
that contract alone so the charting package carries no dependency on the
simulator.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

FIXED_COLUMNS = (
    "run_id", "architecture", "lifetime", "episode", "phase",
    "friendly_resources", "adversary_resources", "win",
    "mean_step_seconds", "var_step_seconds",
)

AGENT_SUFFIXES = ("collected", "base", "Re", "Ra")

PHASES = ("train", "eval")


class SchemaError(Exception):
    """A stats file is missing, malformed, or self-contradictory.

    Messages always start with the offending path so command-line users
    see which file to inspect.
    """


@dataclass(frozen=True)
class AgentShare:
    """One agent's episode totals, split by reward channel."""

    collected: int
    base: float
    from_rivals: float
    from_teammates: float

    @property
    def total_reward(self) -> float:
        return self.base + self.from_rivals + self.from_teammates


@dataclass(frozen=True)
class Row:
    lifetime: int
    episode: int
    phase: str
    friendly_resources: int
    adversary_resources: int
    win: bool
    mean_step_seconds: float
    var_step_seconds: float
    agents: tuple[AgentShare, ...]


@dataclass(frozen=True)
class Run:
    """All episodes from one stats.csv, plus its identifying labels."""

    path: Path
    run_id: str
    architecture: str
    n_agents: int
    rows: tuple[Row, ...] = field(default_factory=tuple)

    @property
    def is_empty(self) -> bool:
        return not self.rows


def _expected_header(n_agents: int) -> list[str]:
    cols = list(FIXED_COLUMNS)
    for i in range(n_agents):
        cols += [f"agent{i}_{suffix}" for suffix in AGENT_SUFFIXES]
    return cols


def _parse_int(cell: str, column: str, path: Path) -> int:
    try:
        return int(cell)
    except ValueError:
        raise SchemaError(f"{path}: non-integer value {cell!r} in column "
                          f"{column}") from None


def _parse_float(cell: str, column: str, path: Path) -> float:
    try:
        return float(cell)
    except ValueError:
        raise SchemaError(f"{path}: non-numeric value {cell!r} in column "
                          f"{column}") from None


def read_stats_file(path: str | os.PathLike) -> Run:
    """Parse one stats.csv, validating it against the schema.

    Raises SchemaError on any deviation: unknown header, ragged rows,
    unparsable numbers, an out-of-range win flag or phase label, or rows
    that disagree about the run's identity.
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    except OSError as exc:
        raise SchemaError(f"{path}: {exc.strerror or exc}") from None
    if not lines:
        raise SchemaError(f"{path}: empty file, expected a header line")

    header = lines[0].split(",")
    if header[: len(FIXED_COLUMNS)] != list(FIXED_COLUMNS):
        raise SchemaError(f"{path}: unrecognized header")
    n_agents, rem = divmod(len(header) - len(FIXED_COLUMNS),
                           len(AGENT_SUFFIXES))
    if rem or header != _expected_header(n_agents):
        raise SchemaError(f"{path}: malformed agent columns in header")

    run_id = architecture = None
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != len(header):
            raise SchemaError(f"{path}: row width {len(cells)} does not "
                              f"match header width {len(header)}")
        if run_id is None:
            run_id, architecture = cells[0], cells[1]
        elif (cells[0], cells[1]) != (run_id, architecture):
            raise SchemaError(f"{path}: rows disagree on run_id or "
                              f"architecture")
        phase = cells[4]
        if phase not in PHASES:
            raise SchemaError(f"{path}: unknown phase {phase!r}")
        win = _parse_int(cells[7], "win", path)
        if win not in (0, 1):
            raise SchemaError(f"{path}: win flag must be 0 or 1, "
                              f"got {cells[7]!r}")
        agents = tuple(
            AgentShare(
                collected=_parse_int(cells[10 + 4 * i],
                                     f"agent{i}_collected", path),
                base=_parse_float(cells[11 + 4 * i], f"agent{i}_base", path),
                from_rivals=_parse_float(cells[12 + 4 * i],
                                         f"agent{i}_Re", path),
                from_teammates=_parse_float(cells[13 + 4 * i],
                                            f"agent{i}_Ra", path))
            for i in range(n_agents))
        rows.append(Row(
            lifetime=_parse_int(cells[2], "lifetime", path),
            episode=_parse_int(cells[3], "episode", path),
            phase=phase,
            friendly_resources=_parse_int(cells[5], "friendly_resources",
                                          path),
            adversary_resources=_parse_int(cells[6], "adversary_resources",
                                           path),
            win=bool(win),
            mean_step_seconds=_parse_float(cells[8], "mean_step_seconds",
                                           path),
            var_step_seconds=_parse_float(cells[9], "var_step_seconds", path),
            agents=agents))

    return Run(path=path, run_id=run_id or "", architecture=architecture or "",
               n_agents=n_agents, rows=tuple(rows))


def discover_runs(results_dir: str | os.PathLike) -> list[Run]:
    """Find and parse every stats.csv below results_dir.

    Runs come back sorted by file path for stable chart ordering.  An
    empty directory tree raises SchemaError so callers can report the
    missing data instead of silently drawing nothing.
    """
    root = Path(results_dir)
    if not root.is_dir():
        raise SchemaError(f"{root}: not a directory")
    paths = sorted(root.rglob("stats.csv"))
    if not paths:
        raise SchemaError(f"{root}: no stats.csv files found")
    return [read_stats_file(p) for p in paths]
