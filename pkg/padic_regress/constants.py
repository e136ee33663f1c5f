"""
Application constants and version information.
"""

# Application version
VERSION = "0.1.0"

# Application name
APP_NAME = "padic-regress"

# File format headers
DATASET_HEADER = "padic-regress-data v1"
MODEL_HEADER = "padic-regress-model v1"
REPORT_HEADER = "padic-regress-fit v1"

# Precision defaults
DEFAULT_WORKING_DIGITS = 32  # M
DEFAULT_GUARD_DIGITS = 16  # G

# Stochastic trainer defaults
DEFAULT_STEPS = 20_000
DEFAULT_BETA0 = 1.0
DEFAULT_BETA_GROWTH = 1.001
DEFAULT_RADIUS_Q = 0.5
DEFAULT_SEED = 0
DEFAULT_ORACLE_TRUNCATION_DIGITS = 3

# Largest lattice the Gibbs oracle will enumerate
DEFAULT_ORACLE_MAX_LATTICE = 1 << 16

# Number of trajectory milestones echoed in fit reports
REPORT_MILESTONES = 10

# CLI exit codes
EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4
