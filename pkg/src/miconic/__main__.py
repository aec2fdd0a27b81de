"""Allow running the command-line interface as ``python -m miconic``."""

import sys

from .cli import main

sys.exit(main())
