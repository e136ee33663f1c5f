"""
Pydantic model for validated command-line invocations.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from sympy import isprime

from padic_regress.constants import (
    DEFAULT_BETA0,
    DEFAULT_BETA_GROWTH,
    DEFAULT_RADIUS_Q,
    DEFAULT_STEPS,
)
from padic_regress.models.trainer import TrainerConfig
from padic_regress.services.dataset_io import Partition
from padic_regress.services.padic import PrecisionPolicy
from padic_regress.services.training import FitMode


class Subcommand(str, Enum):
    GEN = "gen"
    FIT = "fit"
    PREDICT = "predict"
    EVAL = "eval"
    INSPECT = "inspect"


class CommandConfig(BaseModel):
    """Flags of one invocation; required flags are checked per subcommand."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, protected_namespaces=())

    command: Subcommand
    prime: Optional[int] = None
    dimension: Optional[int] = Field(default=None, ge=1)
    degree: Optional[int] = Field(default=None, ge=0)
    working_digits: int = Field(ge=1)
    guard_digits: int = Field(ge=0)
    count: Optional[int] = Field(default=None, ge=0)
    mode: FitMode = FitMode.EXACT
    steps: int = Field(default=DEFAULT_STEPS, ge=0)
    beta0: float = Field(default=DEFAULT_BETA0, ge=0.0)
    beta_growth: float = Field(default=DEFAULT_BETA_GROWTH, ge=1.0)
    radius_q: float = Field(default=DEFAULT_RADIUS_Q, gt=0.0, lt=1.0)
    chains: int = Field(default=1, ge=1)
    seed: int = Field(ge=0, lt=2**64)
    warm_start: bool = False
    train_fraction: Optional[Fraction] = None
    target: Optional[str] = None
    noise: Optional[str] = None
    input_path: Optional[Path] = None
    output_path: Optional[Path] = None
    model_path: Optional[Path] = None
    report_path: Optional[Path] = None
    trajectory_path: Optional[Path] = None
    partition: Optional[Partition] = None
    point: Optional[tuple[str, ...]] = None

    @field_validator("prime")
    @classmethod
    def _prime(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and not isprime(value):
            raise ValueError(f"{value} is not prime")
        return value

    @field_validator("train_fraction", mode="before")
    @classmethod
    def _fraction(cls, value: object) -> Optional[Fraction]:
        if value is None:
            return None
        try:
            fraction = Fraction(str(value))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"train fraction {value!r} is not a rational number") from exc
        if not 0 < fraction <= 1:
            raise ValueError(f"train fraction must lie in (0, 1], got {fraction}")
        return fraction

    @model_validator(mode="after")
    def _required_flags(self) -> CommandConfig:
        required: dict[Subcommand, tuple[str, ...]] = {
            Subcommand.GEN: ("prime", "dimension", "count", "target", "output_path"),
            Subcommand.FIT: ("input_path", "output_path"),
            Subcommand.PREDICT: ("model_path",),
            Subcommand.EVAL: ("model_path", "input_path"),
            Subcommand.INSPECT: (),
        }
        missing = [name for name in required[self.command] if getattr(self, name) is None]
        if missing:
            raise ValueError(f"{self.command.value} requires: {', '.join(missing)}")
        if self.command is Subcommand.FIT and self.mode is FitMode.STOCHASTIC and self.degree is None:
            raise ValueError("stochastic fit requires --K")
        if self.command is Subcommand.PREDICT and (self.input_path is None) == (self.point is None):
            raise ValueError("predict takes exactly one of --in or --point")
        if self.command is Subcommand.INSPECT and (self.input_path is None) == (self.model_path is None):
            raise ValueError("inspect takes exactly one of --in or --model")
        return self

    def policy(self, working_digits: int | None = None) -> PrecisionPolicy:
        return PrecisionPolicy(working_digits or self.working_digits, self.guard_digits)

    def trainer_config(self) -> TrainerConfig:
        return TrainerConfig(
            degree=self.degree,
            steps=self.steps,
            beta0=self.beta0,
            beta_growth=self.beta_growth,
            radius_q=self.radius_q,
            seed=self.seed,
            chains=self.chains,
            warm_start=self.warm_start,
        )
