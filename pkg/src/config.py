"""Configuration settings for liftsynth."""

from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Toolkit settings loaded from environment variables (prefix LIFTSYNTH_)."""

    model_config = SettingsConfigDict(
        env_prefix="LIFTSYNTH_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # App
    app_name: str = "liftsynth"
    log_level: str = "INFO"

    # Parallelism
    threads: int = Field(default=1, ge=1, description="Worker cap for independent designs")

    # H-infinity norm
    hinf_tol_rel: float = Field(default=1e-4, gt=0)
    riccati_tol: float = Field(default=1e-12, gt=0, description="Relative step size that stops the recursion")
    riccati_max_iter: int = Field(default=100_000, ge=1)
    riccati_divergence: float = Field(default=1e12, gt=0)

    # Frequency grids
    grid_points: int = Field(default=512, ge=16)
    grid_refinements: int = Field(default=2, ge=0)

    # FIR synthesis
    synthesis_gap_rel: float = Field(default=1e-3, gt=0)
    synthesis_max_outer: int = Field(default=500, ge=1)
    synthesis_max_inner: int = Field(default=400, ge=1)
    polyak_max_iter: int = Field(default=3000, ge=1)

    # Simulation
    power_window: int = Field(default=10_000, ge=1)
    seed: int = 0

    # Output
    output_dir: str = "output"


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
