"""
Polycycle Toolkit

Process entry point for the command line.
"""

import logging
import sys

from .cli import main
from .config import settings

# Configure logging (stderr, so reports on stdout stay clean)
logging.basicConfig(
    level=settings.LOG_LEVEL,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)
logger = logging.getLogger(__name__)


if __name__ == "__main__":
    sys.exit(main())
