from os import getenv
from dotenv import load_dotenv
from pathlib import Path

from twrc.helper.utils import parse_seed

if Path("config.env").exists():
    load_dotenv("config.env")


class Settings:
    # Numerics
    TOLERANCE = float(getenv("TWRC_TOLERANCE", "1e-9"))
    BISECTION_ITERS = int(getenv("TWRC_BISECTION_ITERS", "20"))
    HULL_GRID_K = int(getenv("TWRC_HULL_GRID_K", "64"))
    POWER_RANGE = getenv("TWRC_POWER_RANGE", "0.01,100")
    # Sweeps
    WORKERS = int(getenv("TWRC_WORKERS", "0"))
    CHUNK_SIZE = int(getenv("TWRC_CHUNK_SIZE", "2500"))
    # HTTP surface
    HOST = getenv("TWRC_HOST", "0.0.0.0")
    PORT = int(getenv("TWRC_PORT", 8080))

    @staticmethod
    def seed() -> int:
        """Default seed; read on every call so a late TWRC_SEED export still applies."""
        return parse_seed(getenv("TWRC_SEED", "0"), "TWRC_SEED")
