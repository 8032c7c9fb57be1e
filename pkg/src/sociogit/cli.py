"""Command-line entry point: one subcommand per miner/calculation plus `all`."""

import argparse
import sys

from sociogit import pipeline, synthetic
from sociogit._version import __version__
from sociogit.errors import ConfigError, SociogitError

# command → (miners, calculations)
_COMMANDS = {name: ((name,), ()) for name in pipeline.MINER_NAMES}
_COMMANDS.update({name: ((), (name,)) for name in pipeline.CALCULATION_NAMES})
_COMMANDS["all"] = (pipeline.MINER_NAMES, pipeline.CALCULATION_NAMES)


def _add_run_flags(parser):
    parser.add_argument("--repo", required=True, help="path to the Git repository")
    parser.add_argument("--output", required=True, help="directory for JSON outputs")
    parser.add_argument(
        "--branches", nargs="+", metavar="NAME",
        help="branches to mine (default: all local branches)",
    )
    parser.add_argument("--threads", type=int, default=1,
                        help="worker processes (default 1)")
    parser.add_argument("--rename-threshold", type=int, default=50,
                        help="content similarity percent for rename pairing")
    parser.add_argument("--max-files-per-commit", type=int, default=500,
                        help="skip commits changing more files than this "
                             "in the dependency miner")
    parser.add_argument("--fix-pattern", default="fix",
                        help="regex marking fix commits, case-insensitive")
    parser.add_argument("--aliases", help="JSON file mapping alias emails "
                                          "to canonical ones")
    parser.add_argument("--communication",
                        help='JSON communication graph {"edges": [[u,v],...]}; '
                             "without it congruence uses the co-commit proxy")
    parser.add_argument("--damping", type=float, default=0.85)
    parser.add_argument("--tol", type=float, default=1e-9)
    parser.add_argument("--max-iter", type=int, default=100)
    parser.add_argument("--need-threshold", type=float, default=0.0,
                        help="coordination needs above this count as need pairs")
    parser.add_argument("--proxy-window-days", type=int, default=30)
    parser.add_argument("--merge-parents", action="store_true",
                        help="also diff merge commits against their later parents")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sociogit",
        description="Mine socio-technical data from local Git repositories.",
    )
    parser.add_argument("--version", action="version", version=f"sociogit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name in pipeline.MINER_NAMES:
        p = sub.add_parser(name, help=f"run the {name} miner")
        _add_run_flags(p)
    for name in pipeline.CALCULATION_NAMES:
        p = sub.add_parser(
            name, help=f"run the {name} calculation (implies its input miners)"
        )
        _add_run_flags(p)
    p = sub.add_parser("all", help="run every miner and calculation")
    _add_run_flags(p)
    p = sub.add_parser("synth", help="generate a synthetic fixture repository")
    p.add_argument("--out", required=True, help="directory to create the repo in")
    p.add_argument("--commits", type=int, default=100)
    p.add_argument("--authors", type=int, default=3)
    p.add_argument("--files", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "synth":
            synthetic.generate_synthetic_repo(
                args.out, args.commits, args.authors, args.files, args.seed
            )
            print(f"generated {args.commits} commits in {args.out}")
            print(f"manifest: {args.out}/{synthetic.MANIFEST_NAME}")
            return 0
        miner_names, calc_names = _COMMANDS[args.command]
        config = pipeline.RunConfig(
            repo_path=args.repo,
            output_dir=args.output,
            miners=miner_names,
            calculations=calc_names,
            branches=args.branches,
            threads=args.threads,
            rename_threshold=args.rename_threshold,
            max_files_per_commit=args.max_files_per_commit,
            fix_pattern=args.fix_pattern,
            include_merge_parents=args.merge_parents,
            damping=args.damping,
            tol=args.tol,
            max_iter=args.max_iter,
            need_threshold=args.need_threshold,
            aliases_path=args.aliases,
            communication_path=args.communication,
            proxy_window_days=args.proxy_window_days,
        )
        result = pipeline.run(config)
        for name in sorted(result.outputs):
            print(f"wrote {result.outputs[name]}")
        meta = result.meta
        print(
            f"mined {meta['commitsVisited']} commits "
            f"({meta['pairsMined']} pairs) in {meta['wallTimeSec']}s"
        )
        return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SociogitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
