"""
Configuration settings for the geometry lab
"""

import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def _flag(name: str, default: str) -> bool:
    return os.getenv(name, default).strip().lower() in ("1", "true", "yes", "on")


class Config:
    """Configuration class for the geometry lab"""

    VERSION = "1.0.0"

    # Integration tolerances
    ODE_RTOL = float(os.getenv('ODE_RTOL', '1e-12'))
    ODE_ATOL = float(os.getenv('ODE_ATOL', '1e-14'))
    CONVERGENCE_TOL = float(os.getenv('CONVERGENCE_TOL', '1e-9'))
    QUAD_EPSREL = float(os.getenv('QUAD_EPSREL', '1e-12'))

    # Sphere tensors start slightly off the singular initial condition
    SPHERE_START_RADIUS = 1e-4
    # Default limit radius is RADIUS_FACTOR / a
    RADIUS_FACTOR = 40.0

    # Surface geodesics
    SURFACE_RADIUS_CAP = float(os.getenv('SURFACE_RADIUS_CAP', '80'))

    # Experiments
    DEFAULT_SEED = int(os.getenv('DEFAULT_SEED', '7'))
    MAX_CONCURRENT_EXPERIMENTS = int(os.getenv('MAX_CONCURRENT_EXPERIMENTS', '4'))

    # Output
    OUTPUT_DIR = os.getenv('OUTPUT_DIR', 'output')
    REPORT_TIMESTAMPS = _flag('REPORT_TIMESTAMPS', 'false')
    PLOTS_ENABLED = _flag('PLOTS_ENABLED', 'false')

    # Logging Configuration
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
    LOG_FILE = os.getenv('LOG_FILE', 'logs/horolab.log')

    @classmethod
    def validate_config(cls):
        """Validate that tolerances and limits are usable"""
        positive = ['ODE_RTOL', 'ODE_ATOL', 'CONVERGENCE_TOL', 'QUAD_EPSREL', 'SURFACE_RADIUS_CAP']

        invalid = [name for name in positive if not getattr(cls, name) > 0]
        if cls.MAX_CONCURRENT_EXPERIMENTS < 1:
            invalid.append('MAX_CONCURRENT_EXPERIMENTS')

        if invalid:
            raise ValueError(f"Invalid configuration values: {', '.join(invalid)}")

        return True

# Validate configuration on import
Config.validate_config()
