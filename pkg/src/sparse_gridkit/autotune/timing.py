import logging
import math
import time
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from ..errors import ClockUnavailable
from ..schemas.bench import BenchRecord, TimingProtocol
from ..schemas.policy import ExecPolicy, default_policy

logger = logging.getLogger(__name__)

FALLBACK_RESOLUTION = 1e-6

Clock = Callable[[], float]


def probe_clock_resolution(samples: int = 200, clock: Clock = time.perf_counter, max_spins: int = 100_000) -> float:
    """Smallest nonzero step observed between consecutive clock reads"""
    smallest = math.inf
    for _ in range(samples):
        start = clock()
        for _ in range(max_spins):
            now = clock()
            if now != start:
                break
        step = now - start
        if 0.0 < step < smallest:
            smallest = step
    if not math.isfinite(smallest):
        logger.warning("Clock never advanced while probing, assuming %.0e s resolution", FALLBACK_RESOLUTION)
        return FALLBACK_RESOLUTION
    return smallest


@lru_cache(maxsize=1)
def default_clock_resolution() -> float:
    resolution = probe_clock_resolution()
    logger.info("perf_counter resolution: %.3e s", resolution)
    return resolution


def time_kernel(
    op: Callable[[], object],
    protocol: Optional[TimingProtocol] = None,
    clock_resolution: Optional[float] = None,
    kernel_name: str = "kernel",
    matrix_name: str = "",
    policy: Optional[ExecPolicy] = None,
    clock: Clock = time.perf_counter,
) -> BenchRecord:
    """Time op until it ran min_repetitions times and the total exceeds
    clock_resolution_multiplier * clock_resolution.

    Warmup runs are executed first and left out of the statistics.
    """
    protocol = protocol or TimingProtocol()
    if clock_resolution is None:
        clock_resolution = default_clock_resolution()
    if not math.isfinite(clock_resolution) or clock_resolution <= 0.0:
        raise ClockUnavailable(f"unusable clock resolution {clock_resolution!r}")

    for _ in range(protocol.warmup_repetitions):
        op()

    target = protocol.clock_resolution_multiplier * clock_resolution
    durations = []
    total = 0.0
    while True:
        start = clock()
        op()
        elapsed = clock() - start
        if not math.isfinite(elapsed):
            raise ClockUnavailable("clock returned a non-finite interval")
        elapsed = max(elapsed, 0.0)
        durations.append(elapsed)
        total += elapsed
        reps = len(durations)
        if reps >= protocol.max_repetitions:
            if total < target:
                logger.warning("%s stopped at max_repetitions=%d below the resolution target", kernel_name, reps)
            break
        if reps >= protocol.min_repetitions and total >= target:
            break

    reps = len(durations)
    return BenchRecord(
        kernel_name=kernel_name,
        matrix_name=matrix_name,
        policy=policy or default_policy(),
        reps=reps,
        total_time=total,
        mean_time=total / reps,
        stddev_time=float(np.std(durations)),
        clock_resolution=clock_resolution,
    )
