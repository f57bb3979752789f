import argparse
import logging
import os
import sys
from typing import List, Optional

# DON'T CHANGE THIS !!!
sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))

from src.routes import analysis, evaluation, generators
from src.routes.common import EXIT_ERROR

logger = logging.getLogger(__name__)


def configure_logging(quiet: bool = False) -> None:
    """Diagnostics go to stderr; stdout carries results only"""
    level_name = os.getenv('NFER_LOG_LEVEL', 'INFO').upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.INFO
    if quiet:
        level = max(level, logging.WARNING)
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format='%(levelname)s %(name)s: %(message)s',
        force=True,
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--quiet', action='store_true', help='Only log warnings and errors')

    parser = argparse.ArgumentParser(prog='nfer', description='Interval rule evaluation over event traces')
    subparsers = parser.add_subparsers(dest='command', required=True)

    # Register command handlers
    evaluation.register(subparsers, parents=[common])
    analysis.register(subparsers, parents=[common])
    generators.register(subparsers, parents=[common])
    return parser


def run_cli(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code not in (0, None) else 0

    configure_logging(getattr(args, 'quiet', False))
    logger.debug(f"Running {args.command}")
    return args.handler(args)


if __name__ == '__main__':
    sys.exit(run_cli())
