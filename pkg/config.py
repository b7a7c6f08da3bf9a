"""
Configuration for the BSC four-codeword analysis toolkit.
Values can be overridden through environment variables.
"""

import logging
import os

logger = logging.getLogger(__name__)

# Result store
DATABASE = os.environ.get('BSC4_DATABASE', 'bsc4.db')

# Engine limits
ORACLE_MAX_N = 24
AUTO_ORACLE_MAX_N = 16
SEARCH_MAX_N = 12
MAX_ORACLE_ROWS = 32
ORACLE_CHUNK_BITS = 14
PARTITION_MAX_N = 16

# Largest n the web API will sweep on request
WEB_VERIFY_MAX_N = 60


def read_workers(value=None) -> int:
    """Parse a worker count, falling back to 1 for anything unusable."""
    raw = os.environ.get('BSC4_WORKERS', '1') if value is None else value
    try:
        workers = int(raw)
    except (TypeError, ValueError):
        logger.warning("Ignoring BSC4_WORKERS=%r: not an integer.", raw)
        return 1
    if workers < 1:
        logger.warning("Ignoring BSC4_WORKERS=%r: must be positive.", raw)
        return 1
    return workers


DEFAULT_WORKERS = read_workers()
