"""Allow ``python -m fluxspin``."""

import sys

from .cli import main

sys.exit(main())
