"""Aggregation and rendering of the six summary charts.

Per-run charts key on ``run_id``; grouped charts key on the
``architecture`` column.  Collection and success numbers come from
eval-phase rows when a run has any, otherwise from all rows; timing
comes from train-phase rows, where step cost is actually measured.
"""

from __future__ import annotations

import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  backend must be set first
import numpy as np  # noqa: E402

from .loader import Run, discover_runs  # noqa: E402

CHART_NAMES = (
    "collection_by_configuration",
    "success_by_configuration",
    "reward_breakdown",
    "collection_by_architecture",
    "success_by_architecture",
    "timestep_timing",
)

REWARD_CHANNELS = ("base", "Re", "Ra")


# -- pure aggregation --------------------------------------------------------

def scoring_rows(run: Run):
    """Rows used for collection and success numbers.

    Eval episodes are the unbiased sample when present; training-only
    files fall back to everything they have.
    """
    ev = [r for r in run.rows if r.phase == "eval"]
    return ev if ev else list(run.rows)


def timing_rows(run: Run):
    tr = [r for r in run.rows if r.phase == "train"]
    return tr if tr else list(run.rows)


def collection_stats(run: Run) -> tuple[float, float]:
    """Mean and standard deviation of friendly collections per episode."""
    vals = np.array([r.friendly_resources for r in scoring_rows(run)],
                    dtype=float)
    return float(vals.mean()), float(vals.std())


def success_rate(run: Run) -> float:
    rows = scoring_rows(run)
    return sum(r.win for r in rows) / len(rows)


def timing_stats(run: Run) -> tuple[float, float]:
    vals = np.array([r.mean_step_seconds for r in timing_rows(run)],
                    dtype=float)
    return float(vals.mean()), float(vals.std())


def breakdown_shares(run: Run) -> list[dict[str, float]]:
    """Percentage split of each agent's lifetime reward across channels.

    Per agent the three percentages sum to 100 unless the agent earned
    nothing at all, in which case all three are zero.
    """
    out = []
    for i in range(run.n_agents):
        base = sum(r.agents[i].base for r in run.rows)
        re = sum(r.agents[i].from_rivals for r in run.rows)
        ra = sum(r.agents[i].from_teammates for r in run.rows)
        total = base + re + ra
        if total == 0:
            out.append({"base": 0.0, "Re": 0.0, "Ra": 0.0})
        else:
            out.append({"base": 100.0 * base / total,
                        "Re": 100.0 * re / total,
                        "Ra": 100.0 * ra / total})
    return out


def by_architecture(runs: list[Run]) -> dict[str, list[Run]]:
    groups: dict[str, list[Run]] = {}
    for run in runs:
        groups.setdefault(run.architecture, []).append(run)
    return {arch: groups[arch] for arch in sorted(groups)}


# -- rendering ---------------------------------------------------------------

def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def _placeholder(ax, title: str) -> None:
    ax.set_title(title)
    ax.text(0.5, 0.5, "no episode data", ha="center", va="center",
            transform=ax.transAxes, fontsize=14, color="0.45")
    ax.set_xticks([])
    ax.set_yticks([])


def _save(fig, out_dir: Path, name: str) -> Path:
    path = out_dir / f"{name}.png"
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def _bar_chart(out_dir: Path, name: str, title: str, ylabel: str,
               labels: list[str], values: list[float],
               errors: list[float] | None = None) -> Path:
    fig, ax = plt.subplots(figsize=(max(6.0, 1.2 * len(labels)), 4.0))
    if not labels:
        _placeholder(ax, title)
        _warn(f"{name}: no episode data to plot")
        return _save(fig, out_dir, name)
    x = np.arange(len(labels))
    ax.bar(x, values, yerr=errors, capsize=3 if errors else 0,
           color="tab:blue")
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.set_title(title)
    ax.set_ylabel(ylabel)
    return _save(fig, out_dir, name)


def _render_breakdown(runs: list[Run], out_dir: Path) -> Path:
    name = "reward_breakdown"
    candidates = [r for r in runs if not r.is_empty]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if not candidates:
        _placeholder(ax, "Reward breakdown")
        _warn(f"{name}: no episode data to plot")
        return _save(fig, out_dir, name)
    run = candidates[0]
    shares = breakdown_shares(run)
    x = np.arange(len(shares))
    bottom = np.zeros(len(shares))
    colors = {"base": "tab:blue", "Re": "tab:orange", "Ra": "tab:green"}
    for channel in REWARD_CHANNELS:
        vals = np.array([s[channel] for s in shares])
        ax.bar(x, vals, bottom=bottom, label=channel,
               color=colors[channel])
        bottom += vals
    ax.set_xticks(x)
    ax.set_xticklabels([f"agent {i}" for i in range(len(shares))])
    ax.set_ylabel("share of reward (%)")
    ax.set_ylim(0, 105)
    ax.set_title(f"Reward breakdown ({run.run_id})")
    ax.legend()
    return _save(fig, out_dir, name)


def plot_all(results_dir: str | Path, out_dir: str | Path) -> list[Path]:
    """Render all six charts from the runs below results_dir.

    Always writes six PNGs; charts whose underlying data is absent come
    out as labeled placeholders with a warning on stderr.  Raises
    SchemaError when discovery or parsing fails.
    """
    runs = discover_runs(results_dir)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    for run in runs:
        if run.is_empty:
            _warn(f"{run.path}: header only, no episodes")

    populated = [r for r in runs if not r.is_empty]
    paths = []

    stats = [(r.run_id, *collection_stats(r)) for r in populated]
    paths.append(_bar_chart(
        out, "collection_by_configuration",
        "Resources collected per configuration", "resources per episode",
        [s[0] for s in stats], [s[1] for s in stats], [s[2] for s in stats]))

    rates = [(r.run_id, success_rate(r)) for r in populated]
    paths.append(_bar_chart(
        out, "success_by_configuration",
        "Win rate per configuration", "fraction of episodes won",
        [s[0] for s in rates], [s[1] for s in rates]))

    paths.append(_render_breakdown(runs, out))

    groups = by_architecture(populated)
    arch_collect = []
    arch_success = []
    arch_timing = []
    for arch, members in groups.items():
        col = [collection_stats(r)[0] for r in members]
        arch_collect.append((arch, float(np.mean(col)), float(np.std(col))))
        arch_success.append((arch, float(np.mean(
            [success_rate(r) for r in members]))))
        arch_timing.append((arch, float(np.mean(
            [timing_stats(r)[0] for r in members]))))

    paths.append(_bar_chart(
        out, "collection_by_architecture",
        "Resources collected per architecture", "resources per episode",
        [a[0] for a in arch_collect], [a[1] for a in arch_collect],
        [a[2] for a in arch_collect]))

    paths.append(_bar_chart(
        out, "success_by_architecture",
        "Win rate per architecture", "fraction of episodes won",
        [a[0] for a in arch_success], [a[1] for a in arch_success]))

    paths.append(_bar_chart(
        out, "timestep_timing",
        "Per-timestep cost per architecture", "seconds per timestep",
        [a[0] for a in arch_timing], [a[1] for a in arch_timing]))

    return paths
