"""Command execution: configuration, logging, reports, ledger and exit codes."""

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from rich.table import Table

from config_manager import ConfigManager, SeedBank
from database_manager import DatabaseManager
from iet_core import IetError
from logger_manager import LoggerManager, LogTag
from models import Report, RunRecord, config_hash

from .commands import HANDLERS, CommandContext
from .parser import UsageError, build_parser

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNVERIFIED = 2

# flags that map one-to-one onto ExperimentConfig fields
CONFIG_FLAGS = (
    "lengths",
    "alpha",
    "kappa",
    "alpha_cf",
    "mode",
    "seed",
    "eps",
    "levels",
    "samples",
    "n_atoms",
    "bins",
    "delta",
    "t_max",
    "kr_grid",
    "ground_metric",
    "out_dir",
    "database_url",
    "log_level",
    "log_file",
)


def load_config(args: argparse.Namespace) -> ConfigManager:
    """Environment first, then the JSON file, then explicit flags."""
    manager = ConfigManager(args.env_file)
    if args.config_file:
        manager.load_config_from_file(args.config_file)
    manager.update_config(**{key: getattr(args, key, None) for key in CONFIG_FLAGS})
    return manager


def checks_table(report: Report) -> Table:
    table = Table(title=f"{report.command}: {'passed' if report.passed else 'FAILED'}")
    table.add_column("check")
    table.add_column("value", justify="right")
    table.add_column("bound", justify="right")
    table.add_column("margin", justify="right")
    table.add_column("ok")
    for check in report.checks:
        table.add_row(
            check.name,
            "" if check.value is None else f"{check.value:.6g}",
            "" if check.bound is None else f"{check.bound:.6g}",
            "" if check.margin is None else f"{check.margin:+.3g}",
            "[green]yes[/green]" if check.passed else "[red]no[/red]",
        )
    return table


def record_run(database_url: str, report: Report, report_path: str) -> Optional[int]:
    log = LoggerManager()
    record = RunRecord(
        report.command, config_hash(report.config), report.passed, report_path
    )
    run_id = DatabaseManager(database_url).save_run(record)
    log.log_debug(f"Run stored as #{run_id}", LogTag.DATABASE)
    return run_id


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse argv, run the subcommand and write its report.

    Returns:
        0 when every check passed, 2 when a check failed, 1 on usage or input errors
    """
    log = LoggerManager()
    try:
        args = build_parser().parse_args(list(argv) if argv is not None else None)
    except UsageError as e:
        sys.stderr.write(f"ietjoinings: {e}\n")
        return EXIT_ERROR
    except SystemExit as e:
        # --help
        return int(e.code or 0)

    try:
        config = load_config(args).config
    except ValueError as e:
        sys.stderr.write(f"ietjoinings: {e}\n")
        return EXIT_ERROR

    log.setup_logger(config.log_level, config.log_file)
    ctx = CommandContext(args, config, SeedBank(config.seed), Path(config.out_dir))
    log.log_info(
        f"Running {args.command} (seed {config.seed}, mode {config.mode})", LogTag.CLI
    )
    try:
        output = HANDLERS[args.command](ctx)
    except (IetError, ValueError, OSError) as e:
        log.log_error(f"{args.command} failed", e)
        return EXIT_ERROR

    report = Report(args.command, config.to_dict(), output.checks, output.data)
    text = report.to_json()
    report_path = ctx.path(f"{args.command}.json")
    with open(report_path, "w", newline="\n", encoding="utf-8") as f:
        f.write(text)
    if not args.quiet:
        sys.stdout.write(text)
    if report.checks:
        log.console.print(checks_table(report))

    if config.database_url and args.command != "history":
        record_run(config.database_url, report, report_path)

    if not report.passed:
        failing: List[str] = [c.name for c in report.failing()]
        log.log_warning(f"Failing checks: {', '.join(failing)}", LogTag.CLI)
        return EXIT_UNVERIFIED
    return EXIT_OK


def main() -> None:
    sys.exit(run_command())
