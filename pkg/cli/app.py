"""
SpinMate command line.

Subcommands: ops, expand, simulate, paradox, falsify, commutator.
Exit codes: 0 success, 2 usage/validation error, 1 internal error.
Diagnostics go to stderr as one JSON object per line.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from typing import Optional

import config
from spin import Axis, Condition, Spin, Z
from utils.experiments import (
    CommutatorTool,
    ExpandTool,
    FalsifyTool,
    OpsTool,
    ParadoxTool,
    SimulateTool,
)
from utils.output_writer import save_output
from utils.base import ERROR_VALIDATION
from .common import (
    CSV_COMMANDS,
    EXIT_INTERNAL,
    EXIT_OK,
    EXIT_USAGE,
    FORMAT_CSV,
    FORMAT_TABLE,
    FORMATS,
    parse_axis,
    parse_condition,
    parse_init,
    parse_sequence,
    parse_spin,
    parse_twice_m,
)

logger = logging.getLogger(__name__)


class UsageError(Exception):
    """Raised for invalid flags; carries the message for the JSON diagnostic."""


def emit_error(kind: str, message: str):
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")


class SpinMateParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors become JSON diagnostics."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    """Validated flags for one invocation."""
    subcommand: str
    twice_s: Optional[int] = None
    axes: list[Axis] = field(default_factory=list)
    shots: int = config.tool_config.DEFAULT_SHOTS
    seed: int = config.tool_config.DEFAULT_SEED
    condition: Optional[Condition] = None
    output_format: str = FORMAT_TABLE
    output_path: Optional[str] = None
    workers: int = config.tool_config.DEFAULT_WORKERS
    tool_kwargs: dict = field(default_factory=dict)

    def validate(self):
        if self.output_format == FORMAT_CSV and self.subcommand not in CSV_COMMANDS:
            raise UsageError(f"csv output is available for {', '.join(sorted(CSV_COMMANDS))} only")
        if self.shots < 1:
            raise UsageError(f"--shots must be positive, got {self.shots}")
        if self.workers < 1:
            raise UsageError(f"--workers must be positive, got {self.workers}")
        return self


def _add_common(sub: argparse.ArgumentParser):
    sub.add_argument("--format", choices=FORMATS, default=FORMAT_TABLE, dest="output_format")
    sub.add_argument("--output", default=None, dest="output_path", help="write to this file instead of stdout")
    sub.add_argument("--seed", type=int, default=None,
                     help=f"random seed (default: ${config.SEED_ENV_VAR} or {config.tool_config.DEFAULT_SEED})")
    sub.add_argument("--verbose", action="store_true", help="debug logging on stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = SpinMateParser(prog="spinmate", description=__doc__.strip().splitlines()[0])
    subs = parser.add_subparsers(dest="subcommand", required=True)

    ops = subs.add_parser("ops", help="print S_x, S_y, S_z and S^2")
    ops.add_argument("--spin", type=parse_spin, required=True)

    exp = subs.add_parser("expand", help="expand an axis eigenstate in another eigenbasis")
    exp.add_argument("--spin", type=parse_spin, required=True)
    exp.add_argument("--axis", type=parse_axis, required=True)
    exp.add_argument("--m", type=parse_twice_m, required=True, dest="twice_m")
    exp.add_argument("--basis", type=parse_axis, default=Z)

    sim = subs.add_parser("simulate", help="sequential Stern-Gerlach Monte Carlo")
    sim.add_argument("--spin", type=parse_spin, required=True)
    sim.add_argument("--init", type=parse_init, default=None,
                     help="initial eigenstate 'axis:m' (default z:+s)")
    sim.add_argument("--sequence", type=parse_sequence, required=True)
    sim.add_argument("--condition", type=parse_condition, default=None, help="post-select 'step=m'")
    sim.add_argument("--shots", type=int, default=config.tool_config.DEFAULT_SHOTS)
    sim.add_argument("--workers", type=int, default=config.tool_config.DEFAULT_WORKERS)

    par = subs.add_parser("paradox", help="scan the paradox condition over spins")
    par.add_argument("--max-spin", type=parse_spin, default=Spin(config.tool_config.DEFAULT_SCAN_TWICE_S),
                     dest="max_spin")
    par.add_argument("--workers", type=int, default=config.tool_config.DEFAULT_WORKERS)

    fal = subs.add_parser("falsify", help="test pre-existing values (v_x, v_z)")
    fal.add_argument("--spin", type=parse_spin, required=True)
    fal.add_argument("--vx", type=parse_twice_m, required=True)
    fal.add_argument("--vz", type=parse_twice_m, required=True)

    com = subs.add_parser("commutator", help="[S_x^2, S_z^2] and the S_x^2 + S_z^2 spectrum")
    com.add_argument("--spin", type=parse_spin, required=True)

    for sub in (ops, exp, sim, par, fal, com):
        _add_common(sub)
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    seed = args.seed if args.seed is not None else config.default_seed()
    run = RunConfig(
        subcommand=args.subcommand,
        twice_s=getattr(args, "spin", None).twice_s if getattr(args, "spin", None) else None,
        seed=seed,
        output_format=args.output_format,
        output_path=args.output_path,
        workers=getattr(args, "workers", config.tool_config.DEFAULT_WORKERS),
    )
    if args.subcommand == "ops":
        run.tool_kwargs = {"spin": args.spin}
    elif args.subcommand == "expand":
        run.axes = [args.axis, args.basis]
        run.tool_kwargs = {"spin": args.spin, "axis": args.axis, "twice_m": args.twice_m, "basis": args.basis}
    elif args.subcommand == "simulate":
        init_axis, init_m = args.init if args.init else (Z, args.spin.twice_s)
        run.axes = args.sequence
        run.shots = args.shots
        run.condition = args.condition
        run.tool_kwargs = {
            "spin": args.spin, "init_axis": init_axis, "init_twice_m": init_m,
            "axes": args.sequence, "shots": args.shots, "seed": seed,
            "condition": args.condition, "workers": args.workers,
        }
    elif args.subcommand == "paradox":
        if args.max_spin.twice_s < 1:
            raise UsageError("--max-spin must be at least 1/2")
        run.twice_s = args.max_spin.twice_s
        run.tool_kwargs = {"twice_s_max": args.max_spin.twice_s, "workers": args.workers}
    elif args.subcommand == "falsify":
        run.tool_kwargs = {"spin": args.spin, "twice_vx": args.vx, "twice_vz": args.vz}
    elif args.subcommand == "commutator":
        run.tool_kwargs = {"spin": args.spin}
    return run.validate()


TOOLS = {
    "ops": OpsTool,
    "expand": ExpandTool,
    "simulate": SimulateTool,
    "paradox": ParadoxTool,
    "falsify": FalsifyTool,
    "commutator": CommutatorTool,
}


def _configure_logging(verbose: bool):
    level = logging.DEBUG if verbose else getattr(logging, str(config.LOG_LEVEL).upper(), logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _configure_logging(args.verbose)
        run = _run_config(args)
    except UsageError as e:
        emit_error("usage", str(e))
        return EXIT_USAGE
    except ValueError as e:
        emit_error("usage", str(e))
        return EXIT_USAGE
    except SystemExit as e:
        # --help
        return int(e.code or 0)

    tool = TOOLS[run.subcommand](config.tool_config)
    result = tool.run(**run.tool_kwargs)
    if not result.success:
        if result.error_type == ERROR_VALIDATION:
            emit_error("validation", result.error)
            return EXIT_USAGE
        logger.error("%s failed: %s", run.subcommand, result.error)
        emit_error("internal", result.error)
        return EXIT_INTERNAL

    try:
        save_output(result.data.text(run.output_format), run.output_path)
    except OSError as e:
        emit_error("internal", f"cannot write output: {e}")
        return EXIT_INTERNAL
    return EXIT_OK
