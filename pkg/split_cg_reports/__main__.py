"""Main entry point for the split_cg_reports module."""

from split_cg_reports.cli import main

if __name__ == '__main__':
    main()
