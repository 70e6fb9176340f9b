"""Allow ``python -m pxy`` as an alias for the ``pxy`` script."""

import sys

from .cli import main

sys.exit(main())
