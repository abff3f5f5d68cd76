"emphi"

# python standard library imports
from __future__ import annotations
from pathlib import Path
from typing import Any, Mapping, Sequence
import argparse
import logging
import sys

# python 3rd party
from rich.console import Console

# Local imports
from emphi import __version__
from emphi.common.exceptions import EmphiException
from emphi.config import load_config, merge_overrides
from emphi.emphibase import StageContext
from emphi.stages import StagesManager

logger = logging.getLogger("emphi")

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"
LOG_DATEFMT = "%Y-%m-%d %H:%M:%S"


#################
# Logging Setup #
#################


def setup_logging(work_dir: Path, verbose: bool = False) -> None:
    """File handler (`emphi.log` in the work directory) plus a console handler,
    both on the package logger. Calling again replaces the previous handlers."""

    level = logging.DEBUG if verbose else logging.INFO
    logger.setLevel(level)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    work_dir.mkdir(parents=True, exist_ok=True)
    file_handler = logging.FileHandler(work_dir / "emphi.log", encoding="utf-8")
    file_handler.setLevel(level)

    console_handler = logging.StreamHandler()
    console_handler.setLevel(level if verbose else logging.WARNING)

    formatter = logging.Formatter(LOG_FORMAT, datefmt=LOG_DATEFMT)
    file_handler.setFormatter(formatter)
    console_handler.setFormatter(formatter)

    logger.addHandler(file_handler)
    logger.addHandler(console_handler)


##################
# Argument setup #
##################


def common_arguments() -> argparse.ArgumentParser:
    "Flags every subcommand accepts."

    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config", type=Path, default=None, help="TOML run configuration.")
    parser.add_argument("--seed", type=int, default=None, help="Run seed (overrides the config).")
    parser.add_argument("--work-dir", type=Path, default=None, help="Artifact directory.")
    parser.add_argument("--data-dir", type=Path, default=None, help="EmpatheticDialogues CSV directory.")
    parser.add_argument("--verbose", action="store_true", help="Debug logging on the console.")
    return parser


def build_parser(manager: StagesManager) -> argparse.ArgumentParser:

    parser = argparse.ArgumentParser(prog="emphi", description="EmpHi empathetic response generator.")
    parser.add_argument("--version", action="version", version=f"emphi {__version__}")
    subparsers = parser.add_subparsers(dest="stage", required=True, metavar="SUBCOMMAND")
    manager.add_subcommands(subparsers, parents=[common_arguments()])
    return parser


def cli_overrides(args: argparse.Namespace) -> dict[str, Any]:
    overrides: dict[str, Any] = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    paths: dict[str, Any] = {}
    if args.work_dir is not None:
        paths["work_dir"] = args.work_dir
    if args.data_dir is not None:
        paths["data_dir"] = args.data_dir
    if paths:
        overrides["paths"] = paths
    return overrides


def format_error(stage_id: str, error: BaseException) -> str:
    "The one-line, machine-parsable failure report."
    message = " ".join(str(error).split())
    return f"error stage={stage_id} kind={type(error).__name__} message={message}"


####################
# ~ Run function ~ #
####################


def main(
    argv: Sequence[str] | None = None,
    console: Console | None = None,
    environ: Mapping[str, str] | None = None,
) -> int:
    """Parse `argv`, run one stage, return the exit status.

    0 on success, 1 on an EmpHi error, 2 on anything unexpected.
    """

    manager = StagesManager()
    args = build_parser(manager).parse_args(argv)
    stage_id: str = args.stage

    try:
        stage = manager.get(stage_id)
        overrides = merge_overrides(stage.config_overrides(args), cli_overrides(args))
        config = load_config(args.config, overrides, environ)
        setup_logging(config.paths.work_dir, args.verbose)
        context: StageContext = {
            "stage_id": stage_id,
            "seed": config.seed,
            "work_dir": config.paths.work_dir,
            "config": config,
        }
        return manager.run(stage_id, args, context, console)
    except EmphiException as error:
        logger.error(str(error))
        print(format_error(stage_id, error), file=sys.stderr)
        return 1
    except Exception as error:
        logger.exception(f"Unexpected failure in {stage_id}")
        print(format_error(stage_id, error), file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())
