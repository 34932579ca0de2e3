"""Command-line interface for trace reports."""

import argparse
import json
import sys
from pathlib import Path

from split_cg.errors import SplitCGError
from split_cg_reports.data_processor import TraceProcessor


def main(argv=None):
    """Main CLI entry point."""
    parser = argparse.ArgumentParser(
        description='Summarize a persisted split conditional gradient trace',
        epilog='Examples:\n'
        '  python -m split_cg_reports runs/interval.csv\n'
        '  python -m split_cg_reports runs/interval.csv --json runs/interval_stats.json',
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )

    parser.add_argument('trace', type=str, help='Path to the trace CSV')

    parser.add_argument('--json', type=str, help='Write the statistics to this JSON file')

    parser.add_argument('--no-validate', action='store_true', help='Skip per-row validation when reading the trace')

    args = parser.parse_args(argv)

    try:
        trace_path = Path(args.trace)
        if not trace_path.exists():
            print(f'❌ Error: Trace file not found: {trace_path}')
            print('Run split-cg first to produce a trace.')
            sys.exit(1)

        print('🔧 Reading trace...')
        processor = TraceProcessor(str(trace_path), validate=not args.no_validate)
        df = processor.load()
        stats = processor.get_summary_stats(df)

        print('\n📊 Trace Summary:')
        print(f'  • Rows: {len(df)}')
        if stats:
            final = stats['final']
            print(f'  • Final F: {final["F_value"]:.8e}')
            print(f'  • Final penalty: {final["penalty"]:.3e}')
            print(f'  • Final gap: {final["fw_gap"]:.3e}')
            if 'termination' in stats:
                print(f'  • Termination: {stats["termination"]}')

        print('\n📈 Insights:')
        for insight in processor.get_convergence_insights(stats):
            print(f'  • {insight}')

        if args.json:
            with open(args.json, 'w') as f:
                json.dump(stats, f, indent=2)
                f.write('\n')
            print(f'\n📄 Statistics written to: {args.json}')

    except SplitCGError as e:
        print(f'❌ Error: {e}')
        sys.exit(1)
    except Exception as e:
        print(f'💥 Unexpected error: {e}')
        print('Please check the trace file and try again.')
        sys.exit(1)


if __name__ == '__main__':
    main()
