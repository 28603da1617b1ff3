import os

from pydantic import AliasChoices, Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8", extra="ignore")

    # integration defaults (StepOptions)
    REL_TOL: float = 1e-10
    ABS_TOL: float = 1e-12
    MAX_ARCLENGTH: float = 200.0
    BLOWUP_SWITCH: float = 1e3
    BOUNDARY_EPS: float = 1e-9
    MAX_STATES: int = 2_000_000
    ODE_METHOD: str = "DOP853"
    DEGENERACY_EPS: float = 1e-13
    LINE_SAMPLES: int = 257

    # reconciliation
    CONTACT_ANGLE_TOLERANCE: float = 1e-4
    ASYMPTOTIC_ANGLE_TOLERANCE: float = 1e-2
    PERIOD_Z_TOLERANCE: float = 1e-6
    PERIOD_THETA_TOLERANCE: float = 1e-8
    GRAPH_COS_THRESHOLD: float = 1e-10
    DECAY_FACTOR: float = 1e-2
    ESCAPE_FACTOR: float = 10.0

    # batch work
    THREADS: int = Field(
        default_factory=lambda: os.cpu_count() or 1,
        validation_alias=AliasChoices("WEINGARTEN_THREADS", "THREADS"),
    )
    SWEEP_REL_TOL: float = 1e-9
    SWEEP_MAX_ARCLENGTH: float = 40.0
    NEIGHBOUR_EPS: float = 1e-6
    FIGURE_MAX_ARCLENGTH: float = 30.0
    MESH_S_SPACING: float = 1e-3

    LOG_LEVEL: str = "INFO"


settings = Settings()
