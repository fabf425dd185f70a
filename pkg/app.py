"""matchgate-sim entry point: `python app.py <command> <file> [flags]`."""

import sys

from cli import main


if __name__ == "__main__":
    sys.exit(main())
