"""Command line entry point.

One subcommand per stage plus `all` and `make-fixture`. Exit codes:
0 success, 2 configuration error, 3 missing or stale input, 4 upstream
API failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

from bibatlas.pipeline import stages
from bibatlas.pipeline.config import ConfigError, load_config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bibatlas",
        description="Bibliometric atlas pipeline: harvest, dedup, resolve, "
        "embed, graphs, communities, phantom, trajectories, describe, export.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--workspace", required=True, help="workspace directory")
        p.add_argument("--config", default=None, help="YAML config file")
        p.add_argument("--seed", type=int, default=None, help="override master seed")
        p.add_argument(
            "--force",
            action="store_true",
            help="rerun even when inputs and config are unchanged",
        )
        p.add_argument("-v", "--verbose", action="store_true")

    for name in stages.STAGE_ORDER:
        p = sub.add_parser(name, help=f"run the {name} stage")
        add_common(p)

    p = sub.add_parser("all", help="run every stage in order")
    add_common(p)

    p = sub.add_parser(
        "make-fixture", help="generate a synthetic workspace for offline runs"
    )
    p.add_argument("--workspace", required=True)
    p.add_argument("--seed", type=int, default=1337)
    p.add_argument("--authors", type=int, default=90)
    p.add_argument("--years", type=int, default=25, help="corpus year span")
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    ws = stages.Workspace(args.workspace)

    if args.command == "make-fixture":
        from bibatlas.pipeline.fixture import make_fixture

        paths = make_fixture(ws, seed=args.seed, n_authors=args.authors, n_years=args.years)
        for rel in paths:
            print(rel)
        return 0

    try:
        config = load_config(args.config)
        if args.seed is not None:
            config = config.with_seed(args.seed)
        if args.command == "all":
            results = stages.run(
                ws, config, force={"all"} if args.force else set()
            )
        else:
            results = [
                stages.run_stage(ws, config, args.command, force=args.force)
            ]
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except stages.StaleInputError as exc:
        print(f"stale input: {exc}", file=sys.stderr)
        return 3
    except stages.UpstreamApiError as exc:
        print(f"upstream API failure: {exc}", file=sys.stderr)
        return 4

    for result in results:
        status = "ran" if result.ran else "skipped (unchanged)"
        print(f"{result.name}: {status}, {len(result.outputs)} outputs")
    return 0


if __name__ == "__main__":
    sys.exit(main())
