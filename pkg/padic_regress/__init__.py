"""
p-adic polynomial regression: finite-precision Q_p arithmetic, the Mahler basis,
digit interleaving of Z_p^n, exact and stochastic fitting, and a command-line front end.
"""

from padic_regress.constants import VERSION

__version__ = VERSION
