from functools import lru_cache

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Tolerances
    validity_tol: float = 1e-12  # state normalization, Hermiticity, trace
    derived_tol: float = 1e-10  # derived properties (unitarity, moments)
    psd_floor: float = 1e-10  # smallest admissible eigenvalue is -psd_floor
    channel_tp_tol: float = 1e-10  # trace preservation at construction
    tp_tol: float = 1e-8  # trace preservation when loading channel files
    design_tol: float = 1e-8  # verification threshold before design estimators

    # Simplex search
    search_tol: float = 1e-8
    search_restarts: int = Field(default=64, ge=1)
    search_max_iter: int = Field(default=10_000, ge=1)

    # Monte Carlo / runtime
    mc_samples: int = Field(default=100_000, ge=100)
    seed: int = Field(default=0, ge=0)
    workers: int = Field(default=1, ge=1)

    log_level: str = "INFO"
    app_version: str = "dev"

    model_config = SettingsConfigDict(env_prefix="FIDELIUM_", env_file=".env", extra="ignore")

    @field_validator(
        "validity_tol", "derived_tol", "psd_floor", "channel_tp_tol", "tp_tol", "design_tol", "search_tol"
    )
    @classmethod
    def _positive(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("tolerances must be positive")
        return value

    def tolerances(self) -> dict[str, float]:
        """All tolerance knobs by name."""
        return {
            "validity": self.validity_tol,
            "derived": self.derived_tol,
            "psd_floor": self.psd_floor,
            "channel_tp": self.channel_tp_tol,
            "tp": self.tp_tol,
            "design": self.design_tol,
            "search": self.search_tol,
        }


@lru_cache
def get_settings() -> Settings:
    return Settings()
