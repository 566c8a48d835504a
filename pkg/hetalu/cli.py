import argparse
import logging
import sys
from typing import Optional, Sequence

from dotenv import load_dotenv

from hetalu import __version__

load_dotenv()

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    # Imported here so tool modules can import helpers from this module.
    from hetalu.tools import TOOL_MODULES

    parser = argparse.ArgumentParser(
        prog="hetalu",
        description="Route ADD operations across heterogeneous ripple-carry adders and report CPI/energy.",
    )
    parser.add_argument("--version", action="version", version=f"hetalu {__version__}")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True
    for module in TOOL_MODULES:
        module.register(subparsers)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = tuple(argv)
    logger.debug(f"Running {args.command} with {argv}")
    return args.handler(args)
