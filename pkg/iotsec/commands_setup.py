from __future__ import annotations

import argparse
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from . import texts

U64_MAX = (1 << 64) - 1


@dataclass(frozen=True)
class Run:
    scenario_path: str
    seed: Optional[int] = None
    report_path: Optional[str] = None
    log_path: Optional[str] = None


@dataclass(frozen=True)
class KeysizeTable:
    format: str = "text"


@dataclass(frozen=True)
class DemoHandshake:
    curve: Optional[str] = None
    verbose: bool = False


@dataclass(frozen=True)
class Version:
    pass


CliCommand = Union[Run, KeysizeTable, DemoHandshake, Version]


def _u64(raw: str) -> int:
    try:
        value = int(raw, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{raw!r} is not an integer")
    if not 0 <= value <= U64_MAX:
        raise argparse.ArgumentTypeError(f"{raw} is outside 0..2^64-1")
    return value


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=texts.PROG, description=texts.DESCRIPTION)
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    run = sub.add_parser("run", help=texts.COMMANDS_DESC["run"])
    run.add_argument("--scenario", required=True, help=texts.ARG_HELP["scenario"])
    run.add_argument("--seed", type=_u64, default=None, help=texts.ARG_HELP["seed"])
    run.add_argument("--report", default=None, help=texts.ARG_HELP["report"])
    run.add_argument("--log", default=None, help=texts.ARG_HELP["log"])

    table = sub.add_parser("keysize-table", help=texts.COMMANDS_DESC["keysize-table"])
    table.add_argument("--format", choices=("text", "json"), default="text", help=texts.ARG_HELP["format"])

    demo = sub.add_parser("demo-handshake", help=texts.COMMANDS_DESC["demo-handshake"])
    demo.add_argument("--curve", choices=("T17", "P256"), default=None, help=texts.ARG_HELP["curve"])
    demo.add_argument("--verbose", action="store_true", help=texts.ARG_HELP["verbose"])

    sub.add_parser("version", help=texts.COMMANDS_DESC["version"])
    return parser


def parse_command(argv: Optional[Sequence[str]] = None) -> CliCommand:
    """Parse argv into a command; argparse exits with status 2 on bad usage."""
    args = make_parser().parse_args(list(argv) if argv is not None else None)
    if args.command == "run":
        return Run(scenario_path=args.scenario, seed=args.seed, report_path=args.report, log_path=args.log)
    if args.command == "keysize-table":
        return KeysizeTable(format=args.format)
    if args.command == "demo-handshake":
        return DemoHandshake(curve=args.curve, verbose=args.verbose)
    return Version()
