# backend/app/utils/settings.py
# Environment-driven settings

import os
import logging
from typing import Optional

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

# Load environment variables
load_dotenv()

WORKERS = 4
LOG_FILE = os.getenv("GWELLS_LOG_FILE", "gausswell.log")
LOG_LEVEL = os.getenv("GWELLS_LOG_LEVEL", "INFO")
OUTPUT_DIR = os.getenv("GWELLS_OUTPUT_DIR", "results")
RESULT_STORE: Optional[str] = os.getenv("GWELLS_RESULT_STORE")


def worker_count() -> int:
    """Worker-pool size; GWELLS_WORKERS overrides the configured value."""
    env_value = os.getenv("GWELLS_WORKERS")
    if env_value:
        try:
            return max(1, int(env_value))
        except ValueError:
            logger.warning(f"Ignoring non-integer GWELLS_WORKERS={env_value!r}")
    return max(1, WORKERS)


def configure_workers(workers: Optional[int]) -> None:
    global WORKERS
    if workers:
        WORKERS = int(workers)
