import os
import logging
from typing import Optional

from dotenv import load_dotenv

# load environment variables
load_dotenv()

DEFAULT_ELL_MAX_SLOTS = 50_000_000
DEFAULT_EXCHANGE_TIMEOUT = 10.0
LOG_FORMAT = "%(asctime)s %(levelname)s:%(name)s: %(message)s"

BENCHMARK_RESULTS_DIR = os.path.join("data", "benchmark_results")
MATRIX_DIR = os.path.join("data", "matrices")


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logging.getLogger(__name__).warning("Ignoring non-integer %s=%r", name, raw)
        return default


def default_worker_count() -> int:
    """Worker-pool size: env override, else hardware parallelism"""
    count = _int_env("SPARSE_GRIDKIT_WORKERS", os.cpu_count() or 1)
    return max(1, count)


def ell_max_slots() -> int:
    return max(1, _int_env("SPARSE_GRIDKIT_ELL_MAX_SLOTS", DEFAULT_ELL_MAX_SLOTS))


def check_interfaces() -> bool:
    return os.getenv("SPARSE_GRIDKIT_CHECK_INTERFACES", "0").strip().lower() in ("1", "true", "yes")


def exchange_timeout() -> float:
    raw = os.getenv("SPARSE_GRIDKIT_EXCHANGE_TIMEOUT")
    try:
        return float(raw) if raw else DEFAULT_EXCHANGE_TIMEOUT
    except ValueError:
        return DEFAULT_EXCHANGE_TIMEOUT


def configure_logging(level: Optional[str] = None) -> None:
    """Install one stream handler on the package logger"""
    level_name = (level or os.getenv("SPARSE_GRIDKIT_LOG_LEVEL", "WARNING")).upper()
    logger = logging.getLogger("src.sparse_gridkit")
    logger.setLevel(getattr(logging, level_name, logging.WARNING))
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt="%H:%M:%S"))
        logger.addHandler(handler)
        logger.propagate = False
