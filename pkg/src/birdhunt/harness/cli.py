"""Command-line interface.

Exit codes: 0 success, 1 runtime failure (diagnostic category printed to
stderr), 2 usage errors (argparse).
"""

from __future__ import annotations

import argparse
import json
import sys

from ..demos import DemoError, load_demo, record_oracle, validate_demo
from ..env import EnvConfig, EnvConfigError
from ..nn import CheckpointError
from .compare import compare
from .experiment import ExperimentConfig, ExperimentError, evaluate, run_experiment
from .presets import PRESET_NAMES, build_preset


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="birdhunt",
        description="Bird-hunter testbed: train, evaluate, record demos, compare, serve.",
    )
    parser.add_argument("--seed", type=int, default=None, help="override run seed(s)")
    parser.add_argument("--out", type=str, default=None, help="override output path")
    parser.add_argument("--quiet", action="store_true", help="suppress progress output")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="run an experiment config or preset")
    group = p_train.add_mutually_exclusive_group(required=True)
    group.add_argument("config", nargs="?", help="experiment config JSON")
    group.add_argument("--preset", choices=PRESET_NAMES, help="built-in experiment")
    p_train.add_argument("--demos", nargs="*", default=None, help="demo files for IL presets")

    p_eval = sub.add_parser("eval", help="greedy-evaluate a checkpoint")
    p_eval.add_argument("checkpoint")
    p_eval.add_argument("env_config")
    p_eval.add_argument("--episodes", type=int, default=100)

    p_rec = sub.add_parser("record-oracle", help="record scripted demonstrations")
    p_rec.add_argument("env_config")
    p_rec.add_argument("--epsilon", type=float, required=True)
    p_rec.add_argument("--episodes", type=int, default=100)
    p_rec.add_argument("-o", "--output", required=True)
    p_rec.add_argument("--actions-only", action="store_true")

    p_val = sub.add_parser("demo-validate", help="validate a demo against an env config")
    p_val.add_argument("demo")
    p_val.add_argument("env_config")

    p_cmp = sub.add_parser("compare", help="tabulate runs from experiment directories")
    p_cmp.add_argument("run_dir", nargs="+")
    p_cmp.add_argument("--threshold", type=float, default=0.9)
    p_cmp.add_argument("-k", "--sustained", type=int, default=3)

    p_srv = sub.add_parser("serve", help="start the play/spectate/dashboard gateway")
    p_srv.add_argument("--port", type=int, default=8710)
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--env-config", action="append", default=None,
                       help="env config JSON file(s) offered to clients")
    p_srv.add_argument("--checkpoint", default=None,
                       help="policy checkpoint for spectate mode")
    p_srv.add_argument("--demo-dir", default="demos",
                       help="directory for recorded sessions")
    p_srv.add_argument("--experiment", default=None,
                       help="experiment config JSON to train in-process, streaming "
                            "metrics to dashboard clients")
    return parser


def _cmd_train(args) -> int:
    if args.preset:
        demos = tuple(args.demos or ())
        out_dir = args.out or f"runs/{args.preset}"
        cfg = build_preset(args.preset, out_dir, demo_paths=demos)
    else:
        cfg = ExperimentConfig.load(args.config)
        if args.out:
            cfg.out_dir = args.out
    if args.seed is not None:
        cfg.seeds = (args.seed,)
    run_experiment(cfg, quiet=args.quiet)
    if not args.quiet:
        print(f"experiment {cfg.experiment_id} written to {cfg.out_dir}")
    return 0


def _cmd_eval(args) -> int:
    env_cfg = EnvConfig.load(args.env_config)
    result = evaluate(
        args.checkpoint, env_cfg, args.episodes, seed=args.seed if args.seed is not None else 0
    )
    print(
        json.dumps(
            {
                "mean_reward": result.mean_reward,
                "mean_episode_length": result.mean_episode_length,
                "mean_entropy": result.mean_entropy,
                "episodes": result.episodes,
            },
            indent=2,
        )
    )
    return 0


def _cmd_record_oracle(args) -> int:
    env_cfg = EnvConfig.load(args.env_config)
    out = args.out or args.output
    demo = record_oracle(
        env_cfg,
        seed=args.seed if args.seed is not None else 0,
        epsilon=args.epsilon,
        episodes=args.episodes,
        path=out,
        include_observations=not args.actions_only,
    )
    summary = demo.summarize()
    if not args.quiet:
        print(
            f"recorded {summary.episode_count} episodes to {out} "
            f"(mean reward {summary.mean_episodic_reward:.3f}, misses {summary.miss_count})"
        )
    return 0


def _cmd_demo_validate(args) -> int:
    env_cfg = EnvConfig.load(args.env_config)
    demo = load_demo(args.demo)
    problems = validate_demo(demo, env_cfg)
    if problems:
        for p in problems:
            print(f"violation: {p}", file=sys.stderr)
        return 1
    if not args.quiet:
        print("ok")
    return 0


def _cmd_compare(args) -> int:
    import os

    from ..metrics import MetricsSeries

    series_map = {}
    for run_dir in args.run_dir:
        for entry in sorted(os.listdir(run_dir)):
            if entry.startswith("metrics-") and entry.endswith(".csv"):
                label = f"{os.path.basename(os.path.normpath(run_dir))}/{entry[8:-4]}"
                series_map[label] = MetricsSeries.load_csv(os.path.join(run_dir, entry))
    if not series_map:
        print("error: no metrics CSVs found", file=sys.stderr)
        return 1
    report = compare(series_map, args.threshold, args.sustained)
    print(report.to_text())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report.to_csv())
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from ..gateway import make_app

    env_cfgs = {}
    for path in args.env_config or []:
        cfg = EnvConfig.load(path)
        name = path.rsplit("/", 1)[-1].removesuffix(".json")
        env_cfgs[name] = cfg
    experiment = ExperimentConfig.load(args.experiment) if args.experiment else None
    app = make_app(
        env_cfgs or None,
        checkpoint=args.checkpoint,
        demo_dir=args.demo_dir,
        experiment=experiment,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


COMMANDS = {
    "train": _cmd_train,
    "eval": _cmd_eval,
    "record-oracle": _cmd_record_oracle,
    "demo-validate": _cmd_demo_validate,
    "compare": _cmd_compare,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (EnvConfigError, ExperimentError) as exc:
        print(f"error[config]: {exc}", file=sys.stderr)
        return 1
    except DemoError as exc:
        print(f"error[demo]: {exc}", file=sys.stderr)
        return 1
    except CheckpointError as exc:
        print(f"error[checkpoint]: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error[serve]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
