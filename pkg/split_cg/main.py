"""Command-line entry point: run a configured problem, a builtin experiment, or a verification suite."""

import argparse
import sys
from typing import Optional

from dotenv import load_dotenv

from split_cg.config import apply_overrides, load_config
from split_cg.errors import ConfigError, SolverError, SplitCGError
from split_cg.experiments import BUILTINS, SUITE_NAMES, ExperimentRunner, builtin_config
from split_cg.models import ProblemConfig
from split_cg.solver import ScheduleKind

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_SOLVER = 3


def _add_output_option(parser: argparse.ArgumentParser):
    parser.add_argument('--out', type=str, help='Output directory (overrides SPLIT_CG_OUTPUT_DIR and the config)')


def _add_run_options(parser: argparse.ArgumentParser):
    _add_output_option(parser)
    parser.add_argument('--max-iters', type=int, help='Override the configured horizon')
    parser.add_argument('--lambda0', type=float, help='Override the initial penalty parameter')
    parser.add_argument('--schedule', choices=[k.value for k in ScheduleKind], help='Override the schedule kind')
    parser.add_argument('--seed', type=int, help='Override the seed used for a random feasible start')
    parser.add_argument('--timing', action='store_true', help='Record wall-clock nanoseconds per iteration')
    parser.add_argument(
        '--progress-every', type=int, default=10_000, help='Print a progress line every N iterations (0 disables)'
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='split-cg',
        description='Split conditional gradient solver and verification suites',
        epilog='Examples:\n'
        '  split-cg run configs/interval.toml\n'
        '  split-cg run configs/interval.toml --max-iters 10000 --out runs/short\n'
        '  split-cg builtin sparse-low-rank\n'
        '  split-cg verify all',
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    commands = parser.add_subparsers(dest='command', required=True)

    run = commands.add_parser('run', help='Solve the problem described by a TOML config (or a run summary JSON)')
    run.add_argument('config', type=str, help='Path to the config file')
    _add_run_options(run)

    builtin = commands.add_parser('builtin', help='Run a built-in experiment')
    builtin.add_argument('name', nargs='?', help=f'One of: {", ".join(BUILTINS)}')
    builtin.add_argument('--list', action='store_true', help='List the built-in experiments and exit')
    _add_run_options(builtin)

    verify = commands.add_parser('verify', help='Run a verification suite')
    verify.add_argument('suite', type=str, help=f'One of: {", ".join(SUITE_NAMES)}')
    _add_output_option(verify)
    verify.add_argument('--horizon', type=int, help='Iterations for the rate checks (default 100000)')
    return parser


def _with_overrides(config: ProblemConfig, args: argparse.Namespace) -> ProblemConfig:
    return apply_overrides(
        config,
        max_iters=args.max_iters,
        lambda0=args.lambda0,
        schedule=args.schedule,
        seed=args.seed,
    )


def _run(config: ProblemConfig, args: argparse.Namespace) -> int:
    runner = ExperimentRunner(output_dir=args.out, progress_every=args.progress_every, timing=args.timing)
    runner.run(config)
    print('✅ Run completed')
    return EXIT_OK


def command_run(args: argparse.Namespace) -> int:
    try:
        return _run(_with_overrides(load_config(args.config), args), args)
    except ConfigError as e:
        if e.path is None:
            raise ConfigError(str(e), args.config) from e
        raise


def command_builtin(args: argparse.Namespace) -> int:
    if not args.list and not args.name:
        print('❌ Error: name a builtin experiment or pass --list')
    if args.list or not args.name:
        print('📋 Built-in experiments:')
        for name, factory in BUILTINS.items():
            print(f'  • {name}: {factory.__doc__}')
        return EXIT_OK if args.list else EXIT_USAGE
    return _run(_with_overrides(builtin_config(args.name), args), args)


def command_verify(args: argparse.Namespace) -> int:
    runner = ExperimentRunner(output_dir=args.out)
    report, _ = runner.verify(args.suite, horizon=args.horizon)
    if report.passed:
        print('✅ All checks passed')
        return EXIT_OK
    for failure in report.failures:
        print(f'❌ {failure.suite}/{failure.name}: {failure.detail or "failed"}')
    return EXIT_FAILED


COMMANDS = {
    'run': command_run,
    'builtin': command_builtin,
    'verify': command_verify,
}


def main(argv: Optional[list[str]] = None) -> int:
    """Main entry point for the CLI application."""
    load_dotenv()
    args = build_parser().parse_args(argv)

    try:
        code = COMMANDS[args.command](args)
    except KeyboardInterrupt:
        print('\n\n⏹️  Run interrupted by user')
        code = EXIT_FAILED
    except ConfigError as e:
        print(f'❌ Error: {e}')
        code = EXIT_USAGE
    except SolverError as e:
        print(f'💥 Solver error: {e}')
        code = EXIT_SOLVER
    except SplitCGError as e:
        print(f'💥 Fatal error: {e}')
        code = EXIT_SOLVER

    if argv is None:
        sys.exit(code)
    return code


if __name__ == '__main__':
    main()
