"""Command line entry points."""

import argparse
import json
import sys

from . import harness, oracle, worldgen


def _parse_dims(text):
    try:
        rows, cols = text.lower().split("x")
        return int(rows), int(cols)
    except ValueError:
        raise argparse.ArgumentTypeError(f"dims must look like 5x5, got {text!r}")


def cmd_generate(args):
    if args.kind == "treasure":
        world = worldgen.generate_treasure_rooms(
            args.seed, args.dims, p_drop=args.p_drop
        )
    else:
        world = worldgen.generate_maze(args.seed, args.dims)
    out = args.out or "world.json"
    worldgen.save_world(world, out)
    print(
        f"wrote {out}: {world.world_id} "
        f"({len(world.rooms)} rooms, {len(world.doors)} doors, "
        f"{len(world.balls)} balls, budget {world.door_budget}, "
        f"r_max {world.r_max})"
    )
    return 0


def cmd_run(args):
    config = harness.RunConfig.load(args.config)
    _history, summary, path = harness.run_experiment(config, resume=args.resume)
    print(f"log: {path}")
    row = summary.to_row()
    for key in ("agent_return_final", "exploit_return_final", "r_max",
                "last_total_gap", "last_explore_gap", "last_exploit_gap"):
        print(f"{key}: {row[key]}")
    return 0


def cmd_solve(args):
    world = worldgen.load_world(args.world)
    log = harness.RunLog.load(args.log)
    history = harness.history_from_log(log, world)
    solution = oracle.solve(oracle.build_graph(history, world), world)
    print(
        json.dumps(
            {
                "r_max": world.r_max,
                "exploit_series": oracle.exploit_series(
                    history, world, "per_interaction"
                ),
                "exploit_series_per_episode": oracle.exploit_series(
                    history, world, "per_episode"
                ),
                "final_value": solution.value,
                "final_path": list(solution.path),
            }
        )
    )
    return 0


def cmd_report(args):
    paths = harness.expand_globs(args.glob)
    if not paths:
        print(f"no logs matched {args.glob}", file=sys.stderr)
        return 1
    out = args.out or f"{args.layout}.csv"
    rows = harness.report(paths, args.layout, out)
    print(f"wrote {out} ({len(rows)} rows from {len(paths)} logs)")
    return 0


def cmd_replay(args):
    world = worldgen.load_world(args.world)
    verdict = harness.replay(args.log, world)
    print(json.dumps(verdict))
    return 0 if verdict["ok"] else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="explorebench",
        description="Room-world simulator with an exact exploitation oracle.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a world and write world.json")
    p.add_argument("--kind", choices=["treasure", "maze"], required=True)
    p.add_argument("--dims", type=_parse_dims, required=True, metavar="RxC")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--p-drop", type=float, default=0.01)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("run", help="execute a configured run, streaming a JSONL log")
    p.add_argument("--config", required=True)
    p.add_argument("--resume", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser(
        "solve", help="emit the exploit series and r_max for a log as JSON"
    )
    p.add_argument("--world", required=True)
    p.add_argument("--log", required=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("report", help="aggregate run logs into a CSV table")
    p.add_argument("--glob", nargs="+", required=True)
    p.add_argument("--layout", choices=["gaps_table", "stats_table", "curves"],
                   default="gaps_table")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("replay", help="re-execute a log and verify it")
    p.add_argument("--log", required=True)
    p.add_argument("--world", required=True)
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
