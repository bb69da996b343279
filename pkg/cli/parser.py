"""Argument parser of the ietjoinings command line."""

import argparse
from typing import Callable, Dict

from config_manager import ExperimentConfig
from config_manager.config_manager import METRICS, MODES

COMMANDS = (
    "iet-info",
    "orbit",
    "renorm-find",
    "tower",
    "joining-sample",
    "kr",
    "approx-powers",
    "weak-closure",
    "bary",
    "switch",
    "schedule",
    "witness",
    "history",
)


class UsageError(Exception):
    """Raised instead of exiting when the command line cannot be parsed."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{message}\n\n{self.format_help()}")


def _common(p: argparse.ArgumentParser) -> None:
    """Flags shared by every subcommand; unset flags are None and keep config values."""
    iet = p.add_argument_group("exchange")
    iet.add_argument("--l", dest="lengths", help="IET lengths l1,l2,l3")
    iet.add_argument("--alpha", help="Rotation number")
    iet.add_argument("--kappa", help="Slit length")
    iet.add_argument(
        "--alpha-cf",
        dest="alpha_cf",
        help='"golden" or partial quotients "2,3,80,500" followed by a golden tail',
    )
    iet.add_argument("--mode", choices=MODES, help="Arithmetic mode")

    run = p.add_argument_group("run")
    run.add_argument(
        "--seed", type=int, help=f"Root seed (default: {ExperimentConfig.seed})"
    )
    run.add_argument("--eps", type=float, help="Closeness target")
    run.add_argument("--levels", type=int, help="Schedule levels")
    run.add_argument("--samples", type=int, help="Verification samples")
    run.add_argument("--atoms", dest="n_atoms", type=int, help="Atoms per joining")
    run.add_argument("--bins", type=int, help="Disintegration bins")
    run.add_argument("--delta", type=float, help="Acceptance radius of the time search")
    run.add_argument("--t-max", dest="t_max", type=float, help="Search horizon")
    run.add_argument("--kr-grid", dest="kr_grid", type=int, help="KR quantization grid")
    run.add_argument(
        "--metric", dest="ground_metric", choices=METRICS, help="Ground metric"
    )
    run.add_argument("--out", dest="out_dir", help="Output directory")
    run.add_argument("--config", dest="config_file", help="JSON configuration file")
    run.add_argument("--env-file", dest="env_file", help=".env file")
    run.add_argument("--db", dest="database_url", help="Run ledger URL")
    run.add_argument("--log-level", dest="log_level", help="Logging level")
    run.add_argument("--log-file", dest="log_file", help="Log file")
    run.add_argument("--quiet", action="store_true", help="Do not print the report")


def _iet_info(p: argparse.ArgumentParser) -> None:
    p.add_argument("--cf-terms", type=int, default=12, help="Partial quotients to list")


def _orbit(p: argparse.ArgumentParser) -> None:
    p.add_argument("--x", required=True, help="Start point")
    p.add_argument("--length", type=int, default=100, help="Orbit length")


def _renorm_find(p: argparse.ArgumentParser) -> None:
    p.add_argument("--all", action="store_true", help="Report rejected candidates too")


def _tower(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k-max", type=int, default=20, help="Candidate scales examined")
    p.add_argument("--base", help="Explicit base a,b; requires --height")
    p.add_argument("--height", type=int, help="Height of an explicit tower")


def _joining_sample(p: argparse.ArgumentParser) -> None:
    p.add_argument("--power", type=int, default=1, help="Power a of the graph joining")
    p.add_argument("--hist-grid", type=int, default=64, help="Histogram grid")


def _kr(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mu", required=True, help="CSV of x,y,w atoms")
    p.add_argument("--nu", required=True, help="CSV of x,y,w atoms")


def _approx_powers(p: argparse.ArgumentParser) -> None:
    p.add_argument("--measure", help="CSV of atoms; the product joining if omitted")
    p.add_argument(
        "--k-max", type=int, default=20, help="Candidate scales for the tower"
    )
    p.add_argument(
        "--strands", type=int, default=2, help="Exponents in the fitted mixture"
    )


def _weak_closure(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=1, help="Power k in (Id + T^k) / 2")
    p.add_argument("--horizon", type=int, default=1000, help="Largest |n| examined")


def _bary(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gamma", default="1,0", help="Initial weights")
    p.add_argument("--a", type=float, default=0.7, help="Weight of the predecessor")
    p.add_argument("--b", type=float, default=0.3, help="Weight of the strand itself")
    p.add_argument("--drift", type=float, default=0.0, help="Additive perturbation")
    p.add_argument("--steps", type=int, default=30, help="Recursion steps")


def _switch(p: argparse.ArgumentParser) -> None:
    p.add_argument("--a", type=int, default=0, help="Exponent followed on A")
    p.add_argument("--b", type=int, default=1, help="Exponent followed on B")
    p.add_argument("--t", type=float, help="Use this renormalization time")


def _strands(p: argparse.ArgumentParser) -> None:
    p.add_argument("--exponents", default="0,1", help="Initial strand exponents")


def _history(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--command", dest="history_command", help="Only runs of this command"
    )
    p.add_argument("--limit", type=int, default=20, help="Rows to list")
    p.add_argument("--id", dest="run_id", type=int, help="Show a single run")
    p.add_argument(
        "--prune-days",
        dest="prune_days",
        type=int,
        help="First delete runs older than this many days",
    )


_EXTRA: Dict[str, Callable[[argparse.ArgumentParser], None]] = {
    "iet-info": _iet_info,
    "orbit": _orbit,
    "renorm-find": _renorm_find,
    "tower": _tower,
    "joining-sample": _joining_sample,
    "kr": _kr,
    "approx-powers": _approx_powers,
    "weak-closure": _weak_closure,
    "bary": _bary,
    "switch": _switch,
    "schedule": _strands,
    "witness": _strands,
    "history": _history,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="ietjoinings",
        description="Self-joinings of 3-interval exchanges: experiments and checks.",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run {name}")
        _common(p)
        _EXTRA[name](p)
    return parser
