"""
Allows `python -m padic_regress`.
"""

import sys

from padic_regress.main import main

sys.exit(main())
