"""Command-line experiment runner.

Usage:

    coolsim run <config> --out <dir> [--jobs N] [--seed S]
    coolsim list [--json]

The config file is TOML or JSON (chosen by extension, with a content
sniff as fallback) with keys::

    scenario = "fig2-qubit-sweep"   # required, see `coolsim list`
    seed = 0                        # optional, overridden by --seed

    [params]                        # optional scenario-specific overrides
    n_gamma = 8

Exit status: 0 success, 1 configuration error, 2 numerical failure
(partial results are kept in the output directory).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

try:
    import tomllib  # py >= 3.11
except ImportError:  # pragma: no cover
    import tomli as tomllib

from . import __version__
from .scenarios import ConfigError, list_scenarios, run_scenario


def _load_config(path: Path) -> dict:
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_bytes()
    if path.suffix.lower() == ".json":
        return json.loads(text)
    if path.suffix.lower() == ".toml":
        return tomllib.loads(text.decode("utf-8"))
    # no recognizable extension: try JSON first, then TOML
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        try:
            return tomllib.loads(text.decode("utf-8"))
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"config is neither valid JSON nor TOML: {exc}")


def _jobs_from(args) -> int:
    if args.jobs is not None:
        return max(1, args.jobs)
    env = os.environ.get("COOLSIM_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"COOLSIM_JOBS must be an integer, got {env!r}")
    return 1


def cmd_run(args) -> int:
    config = _load_config(Path(args.config))
    if not isinstance(config, dict) or "scenario" not in config:
        raise ConfigError("config must contain a 'scenario' key")
    name = config["scenario"]
    params = config.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("'params' must be a table/object")
    seed = args.seed if args.seed is not None else int(config.get("seed", 0))
    jobs = _jobs_from(args)
    out_dir = Path(args.out)
    files = run_scenario(name, params, out_dir, jobs, seed)
    for f in files:
        print(f)
    return 0


def cmd_list(args) -> int:
    print(list_scenarios(machine_readable=args.json))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coolsim",
        description="experiment runner for randomized-measurement cooling",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario from a config file")
    p_run.add_argument("config", help="TOML or JSON config file")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--jobs", type=int, default=None,
                       help="worker count (default: COOLSIM_JOBS or 1)")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
    p_run.set_defaults(func=cmd_run)

    p_list = sub.add_parser("list", help="list available scenarios")
    p_list.add_argument("--json", action="store_true",
                        help="machine-readable output")
    p_list.set_defaults(func=cmd_list)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; the CLI contract reserves 2
        # for numerical failures, so remap usage problems to 1
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except (ConfigError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # numerical failure; partial results preserved
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
