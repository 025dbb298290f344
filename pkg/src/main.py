"""
Command-line entry point for ring-bifurcate.

Commands:
1. ring: Build the Maxwell ring and check its equilibrium residual
2. equilibria: Satellite equilibrium census over the ring
3. scan: Bifurcation events per symmetry block (and central-mass sweeps)
4. continue: Continue the periodic branch of one event
5. verify: Run the independent oracle suite
"""

# Configure logging FIRST before any imports
import argparse
import logging
from pathlib import Path
import sys
from datetime import datetime

log_dir = Path(__file__).parent.parent / 'logs'
log_dir.mkdir(exist_ok=True)
log_file = log_dir / f'ring_bifurcate_{datetime.now().strftime("%Y%m%d_%H%M%S")}.log'

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[
        logging.FileHandler(log_file),
        logging.StreamHandler(sys.stdout)
    ]
)
logger = logging.getLogger(__name__)

# Now import other modules (after logging configuration to prevent conflicts)
# pylint: disable=wrong-import-position
from cli import COMMANDS, ConfigError, RunConfig, load_run_config
from dynamics import DomainError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_VERIFICATION = 3
EXIT_INTERRUPTED = 130


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='ring-bifurcate',
        description='Equivariant bifurcation analysis of the satellite and Maxwell-ring n-body problems',
    )
    parser.add_argument('command', choices=sorted(COMMANDS), help='Workflow to run')
    parser.add_argument('--config', type=Path, default=None, help='key=value run configuration file')
    parser.add_argument('--out', type=Path, default=None, help='Output directory (overrides out_dir)')
    parser.add_argument('--event', type=int, default=None, help='Event index for continue')
    parser.add_argument('--steps', type=int, default=None, help='Continuation steps for continue')
    parser.add_argument(
        '--log-level',
        default='INFO',
        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
        help='Logging level',
    )
    return parser


def run_command(args: argparse.Namespace) -> int:
    """Execute one command and map its outcome to an exit code."""
    start = datetime.now()
    logger.info("=" * 80)
    logger.info(f"RING-BIFURCATE: {args.command.upper()}")
    logger.info("=" * 80)

    try:
        config = load_run_config(args.config) if args.config else RunConfig()
    except ConfigError as e:
        logger.error(f"❌ Invalid configuration: {e}")
        return EXIT_USAGE

    logger.info("Configuration:")
    logger.info(f"  - Problem: {config.problem} (n={config.n}, mu={config.mu})")
    logger.info(f"  - Output: {args.out or config.out_dir}")

    kwargs = {}
    if args.command == 'continue':
        kwargs = {'event_index': args.event, 'steps': args.steps}
    elif args.event is not None or args.steps is not None:
        logger.warning("⚠️  --event and --steps only apply to continue; ignored")

    try:
        result = COMMANDS[args.command](config, args.out, **kwargs)
    except ConfigError as e:
        logger.error(f"❌ {e}")
        return EXIT_USAGE
    except DomainError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return EXIT_DOMAIN

    duration = (datetime.now() - start).total_seconds()
    logger.info("=" * 80)
    for key, value in result.summary.items():
        logger.info(f"   - {key}: {value}")
    for path in result.outputs:
        logger.info(f"   - wrote {path}")
    logger.info(f"Duration: {duration:.2f} seconds")
    logger.info("=" * 80)

    if not result.passed:
        logger.error("❌ Verification failed")
        return EXIT_VERIFICATION
    logger.info(f"✅ {args.command} completed")
    return EXIT_OK


def main(argv=None) -> int:
    """Entry point for the ring-bifurcate command."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        code = EXIT_OK if e.code in (0, None) else EXIT_USAGE
        if argv is None:
            sys.exit(code)
        return code
    logging.getLogger().setLevel(args.log_level)
    try:
        code = run_command(args)
    except KeyboardInterrupt:
        logger.warning("\n⚠️  Interrupted by user")
        code = EXIT_INTERRUPTED
    except Exception as e:
        logger.critical(f"Critical error: {e}", exc_info=True)
        code = EXIT_USAGE
    if argv is None:
        sys.exit(code)
    return code


if __name__ == "__main__":
    main()
