import os
from dotenv import load_dotenv

load_dotenv()


def _env_float(name: str, default: float) -> float:
    value = os.getenv(name)
    return float(value) if value not in (None, "") else default


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    return int(value) if value not in (None, "") else default


class Config:
    VERSION = "0.3.0"

    # Absolute tolerance for O(1) coefficients
    TOLERANCE = _env_float("PGA_TOLERANCE", 1e-12)
    # Incidence / oracle tolerance for composed constructions
    GEOMETRY_TOLERANCE = _env_float("PGA_GEOMETRY_TOLERANCE", 1e-10)
    # Normalization checks on user supplied elements
    NORMALIZATION_TOLERANCE = _env_float("PGA_NORMALIZATION_TOLERANCE", 1e-9)
    # Closed-form exponential against its power series
    SERIES_TOLERANCE = _env_float("PGA_SERIES_TOLERANCE", 1e-12)

    DEFAULT_SEED = _env_int("PGA_SEED", 20240101)

    CHECK_TRIALS_2D = _env_int("PGA_CHECK_TRIALS_2D", 1000)
    CHECK_TRIALS_3D = _env_int("PGA_CHECK_TRIALS_3D", 500)

    EXP_SERIES_TERMS = _env_int("PGA_EXP_SERIES_TERMS", 40)

    TOP_DT = _env_float("PGA_TOP_DT", 1e-3)
    TOP_STEPS = _env_int("PGA_TOP_STEPS", 100000)
    TOP_RECORD_EVERY = _env_int("PGA_TOP_RECORD_EVERY", 100)

    SCREW_SAMPLES = _env_int("PGA_SCREW_SAMPLES", 64)

    RESULTS_DIR = os.getenv("PGA_RESULTS_DIR", "results")

    LOG_LEVEL = os.getenv("PGA_LOG_LEVEL", "INFO")
