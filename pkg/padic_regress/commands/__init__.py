"""
Subcommand handlers. Each takes a validated CommandConfig and returns the text for stdout.
"""

from __future__ import annotations


class UsageError(ValueError):
    """Raised when flag values are well-typed but unusable (bad target or point syntax)."""
