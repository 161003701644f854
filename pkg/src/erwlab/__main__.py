"""Allow running the package itself: python3 -m erwlab <command> ..."""

import sys

from .cli import main

sys.exit(main())
