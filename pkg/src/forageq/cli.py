"""Command-line front end.

Subcommands: `train` (leader architecture, full train + eval), `eval`
(rerun evaluation from saved checkpoints), `sweep` (lifetime/episode
splits at a fixed episode budget), `baseline` (comparison
architectures). Every run writes stats.csv, breakdown.csv and .fsqn
checkpoints into the requested output directory.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import nn
from .baselines import (
    central_param_sets,
    marl_param_sets,
    run_central_full,
    run_marl_full,
)
from .config import ConfigError, RunConfig, load_config, with_overrides
from .nn import CheckpointError
from .orchestrator import (
    leader_param_sets,
    run_evaluation,
    run_full,
    run_sweep,
    save_run,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forageq",
        description="Multi-agent foraging simulator with shared-policy "
                    "dissemination")
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="train the leader, then evaluate")
    train.add_argument("--config", required=True, type=Path)
    train.add_argument("--out", required=True, type=Path)
    train.add_argument("--seed", type=int, default=None)

    ev = sub.add_parser("eval", help="evaluate saved checkpoints")
    ev.add_argument("--config", required=True, type=Path)
    ev.add_argument("--models", required=True, type=Path)
    ev.add_argument("--out", required=True, type=Path)

    sweep = sub.add_parser("sweep",
                           help="compare lifetime/episode splits of one "
                                "episode budget")
    sweep.add_argument("--config", required=True, type=Path)
    sweep.add_argument("--pairs", required=True,
                       help='comma list like "10x40,20x20" '
                            "(lifetimes x episodes)")
    sweep.add_argument("--out", required=True, type=Path)

    base = sub.add_parser("baseline", help="train a comparison architecture")
    base.add_argument("--arch", required=True, choices=("marl", "central"))
    base.add_argument("--config", required=True, type=Path)
    base.add_argument("--out", required=True, type=Path)

    return parser


def _parse_pairs(text: str) -> list[tuple[int, int]]:
    pairs = []
    for part in text.split(","):
        part = part.strip()
        left, sep, right = part.partition("x")
        try:
            if not sep:
                raise ValueError
            pairs.append((int(left), int(right)))
        except ValueError:
            raise ValueError(
                f"malformed pair {part!r}: expected LIFETIMESxEPISODES "
                'like "10x40"') from None
    if not pairs:
        raise ValueError("no configurations given")
    return pairs


def _load_team_checkpoints(models_dir: Path, config: RunConfig):
    leader_path = models_dir / "leader.fsqn"
    if not leader_path.exists():
        raise CheckpointError(f"no leader checkpoint in {models_dir}")
    leader = nn.load_params(leader_path)
    allies = []
    while (path := models_dir / f"ally{len(allies)}.fsqn").exists():
        allies.append(nn.load_params(path))

    expected = {}
    for name, w_shape, b_shape in config.network_spec().layer_dims():
        expected[f"{name}.w"] = w_shape
        expected[f"{name}.b"] = b_shape
    named = [("leader", leader)] + \
        [(f"ally{i}", p) for i, p in enumerate(allies)]
    for label, params in named:
        if {k: v.shape for k, v in params.items()} != expected:
            raise CheckpointError(
                f"checkpoint {label}.fsqn does not match the configured "
                f"network")
    return leader, allies


def _cmd_train(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config = with_overrides(config, seed=args.seed)
    trained, eval_stats = run_full(config)
    save_run(args.out, trained.stats + eval_stats,
             leader_param_sets(trained), run_id=f"single-s{config.seed}")
    print(f"wrote {args.out}/stats.csv "
          f"({len(trained.stats)} train + {len(eval_stats)} eval episodes)")
    return 0


def _cmd_eval(args) -> int:
    config = load_config(args.config)
    leader, allies = _load_team_checkpoints(args.models, config)
    config = with_overrides(config, n_allies=len(allies))
    stats = run_evaluation(leader, allies, config)
    save_run(args.out, stats, {}, run_id=f"eval-s{config.seed}")
    print(f"wrote {args.out}/stats.csv ({len(stats)} eval episodes)")
    return 0


def _cmd_sweep(args) -> int:
    config = load_config(args.config)
    pairs = _parse_pairs(args.pairs)
    rows = run_sweep(config, pairs, args.out)
    print(f"wrote {args.out}/summary.csv ({len(rows)} configurations)")
    return 0


def _cmd_baseline(args) -> int:
    config = load_config(args.config)
    if args.arch == "marl":
        result, eval_stats = run_marl_full(config)
        params = marl_param_sets(result)
    else:
        result, eval_stats = run_central_full(config)
        params = central_param_sets(result)
    save_run(args.out, result.stats + eval_stats, params,
             run_id=f"{args.arch}-s{config.seed}", architecture=args.arch)
    print(f"wrote {args.out}/stats.csv "
          f"({len(result.stats)} train + {len(eval_stats)} eval episodes)")
    return 0


_COMMANDS = {"train": _cmd_train, "eval": _cmd_eval,
             "sweep": _cmd_sweep, "baseline": _cmd_baseline}


def cli(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as stop:  # argparse already printed usage/help
        return int(stop.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, CheckpointError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(cli())


if __name__ == "__main__":
    entry()
