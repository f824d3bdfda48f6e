"""Configuration settings for the univalence toolkit"""

import math
import os
from dotenv import load_dotenv

load_dotenv()


class Settings:
    """Application settings"""

    # Runtime
    LOG_LEVEL = os.getenv("UNIDISC_LOG_LEVEL", "INFO")
    OUTPUT_DIR = os.getenv("UNIDISC_OUTPUT_DIR", "reports")
    DEFAULT_SEED = int(os.getenv("UNIDISC_SEED", "20240601"))

    # Run ledger
    DATABASE_URL = os.getenv("UNIDISC_DATABASE_URL", "sqlite:///data/runs.db")
    RECORD_RUNS = os.getenv("UNIDISC_RECORD_RUNS", "true").lower() == "true"

    # Jets and operators
    CRITICAL_POINT_EPS = 1e-300  # |f'| below this is a critical point
    SINGULARITY_EPS = 1e-14  # distance at which a point hits a declared singularity

    # Path integration
    PATH_TOL = float(os.getenv("UNIDISC_PATH_TOL", "1e-10"))
    PATH_SUBDIVISION_LIMIT = 2000  # subintervals per adaptive quadrature call
    CHECKPOINT_DIVISIONS = 512  # boundary checkpoints every pi/512

    # Sup-norm grid
    LADDER_DEPTH = 24  # r_k = 1 - 2^-k
    R_CAP = 1 - 1e-7
    ANGULAR_FACTOR = 16
    POLISH_ROUNDS = 3
    NORM_TOL = float(os.getenv("UNIDISC_NORM_TOL", "1e-4"))

    # Criteria
    CRITERION_TOL = 1e-9
    VERDICT_SUB_RINGS = 4  # intermediate rings per dyadic band for verdict grids
    LIMSUP_POINTS = 40
    CLUSTERING_THRESHOLD = 6.0
    UNIVALENCE_THRESHOLD = 1.0

    # Injectivity sampling
    COLLISION_TOL = 1e-9
    SEPARATION_FLOOR = 0.05  # hyperbolic distance
    REFINE_CANDIDATES = 32

    # Valence
    NEWTON_SEEDS = 1024
    NEWTON_MAX_ITER = 60
    DEDUP_THRESHOLD = 1e-4  # pseudo-hyperbolic
    TRACE_COLLAR = 1e-4
    MAX_TURN = 0.2  # radians per trace step
    TRACE_POINT_BUDGET = 400000
    TRACE_INITIAL_POINTS = 2048
    TRACE_MIN_STEP = 1e-9  # turning is not refined below this parameter step
    TRACE_RELATIVE_CHORD = 2e-3  # default chord tolerance, relative to the image diameter
    SIGN_GRID = 4096
    WINDING_RESIDUAL = 0.1
    WINDING_MAX_POINTS = 2 ** 20
    CONTOUR_NUDGES = 8
    TANGENCY_ANGLE = 1e-3
    SCANLINES = 512

    # Distortion
    DIVERGENCE_CAP = 1e12
    LIMSUP_TAIL_FACTOR = 10.0
    ENVELOPE_PANELS = 64

    # Harmonic
    DELTA0 = float(os.getenv("UNIDISC_DELTA0", "0.5"))
    HARMONIC_SCHWARZIAN_EXPONENT = float(os.getenv("UNIDISC_HARMONIC_EXPONENT", "2"))

    # Experiments
    CRITICAL_C_TOL = 0.01
    SLOPE_REFERENCE = 100 / 63

    def validate(self):
        """Validate settings"""
        if not 0 < self.R_CAP < 1:
            raise ValueError(f"R_CAP must lie in (0, 1), got {self.R_CAP}")
        if self.LADDER_DEPTH < 1 or 1 - 2.0 ** -self.LADDER_DEPTH >= 1:
            raise ValueError(f"LADDER_DEPTH out of range: {self.LADDER_DEPTH}")
        if self.CHECKPOINT_DIVISIONS < 4:
            raise ValueError("CHECKPOINT_DIVISIONS must be at least 4")
        if not 0 < self.TRACE_COLLAR < math.pi / self.CHECKPOINT_DIVISIONS:
            raise ValueError("TRACE_COLLAR must be positive and smaller than one checkpoint step")
        if self.HARMONIC_SCHWARZIAN_EXPONENT <= 0:
            raise ValueError("HARMONIC_SCHWARZIAN_EXPONENT must be positive")
        return True

    @property
    def checkpoint_step(self) -> float:
        """Boundary checkpoint spacing in the parameter t"""
        return math.pi / self.CHECKPOINT_DIVISIONS


# Global settings instance
settings = Settings()
