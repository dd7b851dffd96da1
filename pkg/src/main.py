import argparse
import logging
import os
import sys

# Add the src directory to the path so we can import our modules
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from cli import COMMANDS, load_run_config, run
from config import CONFIGURATIONS, DEFAULT_CONFIG, get_config, list_configurations
from errors import ConfigError

logger = logging.getLogger("iia")


def build_parser():
    parser = argparse.ArgumentParser(prog="iia", description="Type IIA flow laboratory on the flat 6-torus")
    parser.add_argument("--list", action="store_true", help="list configuration presets and exit")
    parser.add_argument("command", nargs="?", choices=COMMANDS)
    parser.add_argument("--manifest", help="INI manifest with [background] [perturbation] [flow] [experiment] [output]")
    parser.add_argument("--out", help="output directory (overrides [output] directory)")
    parser.add_argument("--seed", type=int, help="random seed recorded in every output")
    parser.add_argument("--grid-n", type=int, dest="grid_n", help="grid resolution per axis")
    parser.add_argument("--config", choices=sorted(CONFIGURATIONS), default=None,
                        help=f"configuration preset (default: {DEFAULT_CONFIG})")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    return parser


def main(argv=None):
    """Main function: parse flags, validate the run, execute it"""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    if args.list:
        list_configurations()
        return 0
    if args.command is None:
        parser.print_usage()
        return ConfigError.exit_code

    try:
        config = load_run_config(
            args.command,
            manifest=args.manifest,
            out=args.out,
            seed=args.seed,
            grid_n=args.grid_n,
            preset=args.config,
        )
    except ConfigError as exc:
        logger.error("%s", exc)
        return exc.exit_code

    preset = get_config(config.preset)
    logger.info("Using configuration: %s", preset["description"])
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
