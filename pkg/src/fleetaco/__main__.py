"""python -m fleetaco entry point."""

import sys

from fleetaco.cli import main

sys.exit(main())
