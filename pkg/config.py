import os
import logging


class MulffsConfig:
    """Runtime settings, read from the environment once at import time.

    MAX_CELLS is the exception: the dense-table guard is re-read on every call
    through max_cells() so a single process can honour a changed
    MULFFS_MAX_CELLS.
    """

    MAX_CELLS = 65536
    NCL_MAX_N = 12
    LOG_LEVEL = getattr(logging, os.getenv('MULFFS_LOG_LEVEL', 'WARNING').upper(), logging.WARNING)
    LOG_FILE = os.getenv('MULFFS_LOG_FILE')
    LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    PLAN_CACHE_SIZE = 10000
    ENUMERATION_CACHE_SIZE = 32
    DEFAULT_INDEX_SET_SIZE = 2
    RANDOM_NUMERATOR_RANGE = 3
    RANDOM_DENOMINATOR_POWERS = 2

    @classmethod
    def max_cells(cls) -> int:
        raw = os.getenv('MULFFS_MAX_CELLS')
        if raw is None:
            return cls.MAX_CELLS
        try:
            return int(raw)
        except ValueError:
            logging.getLogger(__name__).warning(
                f"Ignoring non-integer MULFFS_MAX_CELLS={raw!r}; using {cls.MAX_CELLS}.")
            return cls.MAX_CELLS
