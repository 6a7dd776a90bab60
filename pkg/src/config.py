from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    TOL_SYMPL: float = 1e-8  # ||S^T J S - J||_max, relative to ||S||
    TOL_SYM: float = 1e-8
    EPS_EIG: float = 1e-8  # times max(1, spectral norm of the form)
    EPS_RANK: float = 1e-8  # times the largest singular value
    EPS_BRANCH: float = 1e-6  # radians from the cut of Log
    EPS_DET: float = 1e-8  # relative to ||S - I||^(2n)
    INTEGRALITY_TOL: float = 1e-6
    MAX_REFINEMENT_DEPTH: int = 40
    INITIAL_PATH_SAMPLES: int = 64
    STEPS_PER_PERIOD: int = 2048
    MAX_STEP_DOUBLINGS: int = 3
    EPS_ORBIT_CLOSED_FORM: float = 1e-9
    EPS_ORBIT_INTEGRATED: float = 1e-6
    DRIFT_TOL: float = 1e-7
    LOG_LEVEL: str = "INFO"
    TOLERANCE_PROFILE: str = "default"

    class Config:
        env_file = ".env"
        env_prefix = "SYMPLX_"

    def for_profile(self, profile: str) -> "Settings":
        """Copy of these settings under a named tolerance profile."""
        if profile == "default":
            return self.model_copy(update={"TOLERANCE_PROFILE": "default"})
        if profile == "strict":
            return self.model_copy(
                update={
                    "TOL_SYMPL": self.TOL_SYMPL / 100,
                    "TOL_SYM": self.TOL_SYM / 100,
                    "EPS_EIG": self.EPS_EIG / 100,
                    "EPS_RANK": self.EPS_RANK / 100,
                    "EPS_DET": self.EPS_DET / 100,
                    "INTEGRALITY_TOL": self.INTEGRALITY_TOL / 10,
                    "TOLERANCE_PROFILE": "strict",
                }
            )
        raise ValueError(f"unknown tolerance profile: {profile}")


settings = Settings()
