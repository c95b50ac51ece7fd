import os
import logging

from dotenv import load_dotenv

load_dotenv()

LOG_LEVEL = os.getenv("SZWALK_LOG_LEVEL", "INFO")

# Reference oracle refuses N above this unless explicitly overridden
DENSE_CAP = int(os.getenv("SZWALK_DENSE_CAP", "32"))

# Semiclassical memory budget, in units of N^2 entries (i.e. states per chunk)
BATCH_MEMORY_STATES = int(os.getenv("SZWALK_BATCH_MEMORY_STATES", "64"))

BENCH_MIN_SIZE = int(os.getenv("SZWALK_BENCH_MIN_SIZE", "1000"))

WORKERS = int(os.getenv("SZWALK_WORKERS", "1"))


def configure_logging(level: str = None) -> None:
    """
    Configure root logging for an entry point (CLI or API).
    """
    logging.basicConfig(
        level=(level or LOG_LEVEL).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
