"""Entry point for running the package as a module."""

from split_cg.main import main

if __name__ == '__main__':
    main()
