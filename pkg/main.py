# backend/main.py
# Entry point for the gausswell command-line tool

import logging
import sys

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

from app.utils.settings import LOG_FILE, LOG_LEVEL  # noqa: E402

# Configure logging
logging.basicConfig(
    level=getattr(logging, LOG_LEVEL.upper(), logging.INFO),
    format="%(asctime)s %(levelname)s: %(message)s",
    handlers=[logging.FileHandler(LOG_FILE), logging.StreamHandler()],
)
logger = logging.getLogger(__name__)


from app.api.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
