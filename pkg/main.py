"""Main entry point for the unidisc toolkit"""

import argparse
import logging
import sys
from typing import List, Optional

from config.settings import settings
from unidisc import __version__
from unidisc.commands.handlers import EXIT_CONFIG, EXIT_FAIL, get_experiment_handler
from unidisc.commands.parser import COMMANDS, config_parser
from unidisc.commands.validation import EXPERIMENTS
from unidisc.errors import ConfigError
from unidisc.storage.ledger import get_run_ledger

logger = logging.getLogger(__name__)


def build_argument_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="unidisc", description="Univalence toolkit for maps of the unit disc")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=settings.LOG_LEVEL, help="Logging level (default from UNIDISC_LOG_LEVEL)")
    parser.add_argument("--no-ledger", action="store_true", help="Do not record the run in the ledger database")
    subparsers = parser.add_subparsers(dest="command", required=True)

    for command in COMMANDS:
        sub = subparsers.add_parser(command)
        if command == "reproduce":
            sub.add_argument("experiment", choices=EXPERIMENTS)
        sub.add_argument("--config", help="JSON experiment config")
        sub.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY:VALUE",
                         help="Override a config field, e.g. map.C:2.21 or params.tol:1e-6")
        sub.add_argument("--output", help=f"Report directory (default {settings.OUTPUT_DIR})")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    args = build_argument_parser().parse_args(argv)

    # Setup logging
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    try:
        settings.validate()
        config = config_parser.build(
            args.command,
            path=args.config,
            overrides=args.overrides,
            experiment=getattr(args, "experiment", None),
            output_dir=args.output,
        )
    except (ConfigError, ValueError) as e:
        logger.error(f"Config error: {e}")
        print(f"Config error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    ledger = None
    if settings.RECORD_RUNS and not args.no_ledger:
        ledger = get_run_ledger()

    try:
        response = get_experiment_handler(ledger).run(config)
    except Exception as e:
        logger.error(f"Error running {args.command}: {e}", exc_info=True)
        return EXIT_FAIL
    finally:
        if ledger is not None:
            ledger.db.close()

    print(response["message"])
    return response["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
