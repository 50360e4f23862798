"""Allow `python -m roilab` as an uninstalled-entry-point twin of roi-lab."""

import sys

from .cli import main

sys.exit(main())
