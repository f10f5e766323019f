import argparse
from enum import Enum
from typing import Any

from pydantic import BaseModel, Field, ValidationError, field_validator

from fidelium.config import get_settings
from fidelium.errors import UsageError


class Command(str, Enum):
    BASIS = "basis"
    DESIGN_GEN = "design-gen"
    DESIGN_VERIFY = "design-verify"
    CHANNEL_GEN = "channel-gen"
    FIDELITY = "fidelity"
    SELFTEST = "selftest"


class RunConfig(BaseModel):
    """One fully resolved CLI invocation."""

    command: Command
    dim: int | None = Field(default=None, ge=2)
    seed: int = Field(ge=0)
    workers: int = Field(default=1, ge=1)
    tolerances: dict[str, float]

    # io paths
    input_path: str | None = None
    output_path: str | None = None
    channel_path: str | None = None
    gate_path: str | None = None
    design_path: str | None = None

    # command specific
    method: str | None = None
    kind: str | None = None
    p: float | None = None
    k: int | None = None
    samples: int | None = Field(default=None, ge=100)
    suite: str | None = None
    channels: int = Field(default=10, ge=1)

    @field_validator("tolerances")
    @classmethod
    def _positive(cls, value: dict[str, float]) -> dict[str, float]:
        bad = {name: tol for name, tol in value.items() if not tol > 0}
        if bad:
            raise ValueError(f"tolerances must be positive: {bad}")
        return value

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        settings = get_settings()
        tolerances = settings.tolerances()
        for name, flag in (("tp", "tp_tol"), ("design", "design_tol"), ("search", "tol")):
            if getattr(args, flag, None) is not None:
                tolerances[name] = getattr(args, flag)
        values: dict[str, Any] = {
            key: value for key, value in vars(args).items()
            if key in cls.model_fields and value is not None
        }
        values.setdefault("seed", settings.seed)
        values.setdefault("workers", settings.workers)
        values["tolerances"] = tolerances
        try:
            return cls(**values)
        except ValidationError as e:
            raise UsageError.from_validation("invalid arguments", e) from e
