"""
Pydantic models describing trainer settings.
"""

from __future__ import annotations

import math

from pydantic import BaseModel, ConfigDict, Field

from padic_regress.constants import (
    DEFAULT_BETA0,
    DEFAULT_BETA_GROWTH,
    DEFAULT_ORACLE_TRUNCATION_DIGITS,
    DEFAULT_RADIUS_Q,
    DEFAULT_SEED,
    DEFAULT_STEPS,
)


class TrainerConfig(BaseModel):
    """
    Settings for the stochastic walk.

    The inverse temperature follows beta_i = beta0 * beta_growth**i; beta0 = 0
    turns the walk into a blind search. Proposal balls have radius p^-r with
    P(r = j) = (1 - radius_q) * radius_q**j.
    """

    model_config = ConfigDict(frozen=True)

    degree: int = Field(ge=0)
    steps: int = Field(default=DEFAULT_STEPS, ge=0)
    beta0: float = Field(default=DEFAULT_BETA0, ge=0.0)
    beta_growth: float = Field(default=DEFAULT_BETA_GROWTH, ge=1.0)
    radius_q: float = Field(default=DEFAULT_RADIUS_Q, gt=0.0, lt=1.0)
    seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2**64)
    chains: int = Field(default=1, ge=1)
    truncation_digits: int = Field(default=DEFAULT_ORACLE_TRUNCATION_DIGITS, ge=1)  # oracle depth t
    warm_start: bool = False

    def beta(self, step: int) -> float:
        try:
            return self.beta0 * self.beta_growth**step
        except OverflowError:
            return math.inf if self.beta0 else 0.0

    def echo(self) -> tuple[tuple[str, str], ...]:
        return tuple((name, str(value)) for name, value in self.model_dump().items())
