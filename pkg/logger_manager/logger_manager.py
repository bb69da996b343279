"""Logger manager for tagged, rich-formatted experiment logs."""

import logging
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, List, Optional

from rich.console import Console
from rich.logging import RichHandler

ROOT_LOGGER = "ietjoinings"
LIBRARY_LOGGERS = ("iet_core", "renorm", "towers", "joinings", "construction")
FILE_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

_LEVELS = {
    "DEBUG": logging.DEBUG,
    "INFO": logging.INFO,
    "WARNING": logging.WARNING,
    "ERROR": logging.ERROR,
}


class LogTag(Enum):
    """Subsystem a log entry belongs to."""

    IET = "IET"
    RENORM = "RENORM"
    TOWER = "TOWER"
    JOINING = "JOINING"
    KR = "KR"
    SWITCH = "SWITCH"
    SCHEDULE = "SCHEDULE"
    WITNESS = "WITNESS"
    CLI = "CLI"
    DATABASE = "DATABASE"
    ERROR = "ERROR"
    WARNING = "WARNING"
    INFO = "INFO"
    DEBUG = "DEBUG"


class LoggerManager:
    """
    Process-wide logger shared by the runner, the construction pipeline and scripts.

    Console output goes to stderr so that reports printed on stdout stay clean.
    """

    _instance: Optional["LoggerManager"] = None

    def __new__(cls, *args: Any, **kwargs: Any) -> "LoggerManager":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self) -> None:
        if getattr(self, "initialized", False):
            return
        self.initialized = True
        self.console = Console(stderr=True)
        self.logger: Optional[logging.Logger] = None
        self.file_handler: Optional[logging.FileHandler] = None
        self.setup_logger()

    def setup_logger(
        self,
        log_level: str = "INFO",
        log_file: Optional[str] = None,
        console_output: bool = True,
    ) -> None:
        """
        (Re)attach handlers to the tagged logger and the library package loggers.

        Library modules log through `logging.getLogger(__name__)`; attaching the same
        handlers to their package loggers puts that output next to tagged entries.

        Args:
            log_level: DEBUG, INFO, WARNING or ERROR
            log_file: Plain-text log file, created with its parent directory
            console_output: Attach the rich stderr handler
        """
        level = _LEVELS.get(log_level.upper())
        if level is None:
            raise ValueError(f"Unknown log level {log_level!r}")

        handlers: List[logging.Handler] = []
        if console_output:
            rich_handler = RichHandler(
                console=self.console, show_path=False, markup=True, rich_tracebacks=True
            )
            rich_handler.setFormatter(logging.Formatter("%(message)s"))
            handlers.append(rich_handler)

        if self.file_handler is not None:
            self.file_handler.close()
            self.file_handler = None
        if log_file:
            Path(log_file).parent.mkdir(parents=True, exist_ok=True)
            self.file_handler = logging.FileHandler(log_file, encoding="utf-8")
            self.file_handler.setFormatter(
                logging.Formatter(FILE_FORMAT, datefmt="%Y-%m-%d %H:%M:%S")
            )
            handlers.append(self.file_handler)

        self._configure((ROOT_LOGGER,) + LIBRARY_LOGGERS, level, handlers)
        self.logger = logging.getLogger(ROOT_LOGGER)

    @staticmethod
    def _configure(
        names: Iterable[str], level: int, handlers: List[logging.Handler]
    ) -> None:
        for handler in handlers:
            handler.setLevel(level)
        for name in names:
            logger = logging.getLogger(name)
            logger.setLevel(level)
            logger.handlers = list(handlers)
            logger.propagate = False

    def log(
        self,
        tag: LogTag,
        message: str,
        level: str = "INFO",
    ) -> None:
        """Send a tagged message to the handlers; the record carries the tag."""
        if self.logger is not None:
            self.logger.log(
                _LEVELS.get(level.upper(), logging.INFO),
                f"[bold green][{tag.value}][/bold green] {message}",
                extra={"tag": tag.value},
            )

    def log_check(
        self, tag: LogTag, name: str, passed: bool, margin: Optional[float]
    ) -> None:
        """Log a verified inequality; failures are warnings."""
        status = "[green]pass[/green]" if passed else "[red]FAIL[/red]"
        suffix = "" if margin is None else f" (margin {margin:.4g})"
        self.log(tag, f"{name}: {status}{suffix}", "INFO" if passed else "WARNING")

    def log_error(self, message: str, exception: Optional[Exception] = None) -> None:
        if exception is not None:
            message = f"{message}: {exception}"
        self.log(LogTag.ERROR, message, level="ERROR")

    def log_warning(self, message: str, tag: LogTag = LogTag.WARNING) -> None:
        self.log(tag, message, level="WARNING")

    def log_info(self, message: str, tag: LogTag = LogTag.INFO) -> None:
        self.log(tag, message, level="INFO")

    def log_debug(self, message: str, tag: LogTag = LogTag.DEBUG) -> None:
        self.log(tag, message, level="DEBUG")
