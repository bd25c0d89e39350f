from asyncio import gather, get_running_loop
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Sequence, Tuple

import psutil
import uvloop

from twrc import LOGGER
from twrc.config import Settings


def resolve_workers(workers: int = None) -> int:
    workers = Settings.WORKERS if workers is None else workers
    if workers and workers > 0:
        return workers
    return psutil.cpu_count(logical=False) or psutil.cpu_count() or 1


def chunk_ranges(total: int, chunk_size: int = None) -> List[Tuple[int, int]]:
    chunk_size = max(1, chunk_size or Settings.CHUNK_SIZE)
    return [(start, min(start + chunk_size, total)) for start in range(0, total, chunk_size)]


async def _gather_chunks(fn: Callable, jobs: Sequence[tuple], workers: int) -> list:
    loop = get_running_loop()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = []
        for index, args in enumerate(jobs):
            LOGGER.info(f"Dispatching chunk {index + 1}/{len(jobs)}")
            futures.append(loop.run_in_executor(pool, fn, *args))
        # results come back in submission order
        return await gather(*futures)


def run_chunks(fn: Callable, jobs: Sequence[tuple], workers: int = None) -> list:
    """Run fn(*args) for every job, across worker processes when it pays off."""
    workers = resolve_workers(workers)
    if workers <= 1 or len(jobs) <= 1:
        return [fn(*args) for args in jobs]
    loop = uvloop.new_event_loop()
    try:
        return loop.run_until_complete(_gather_chunks(fn, jobs, min(workers, len(jobs))))
    finally:
        loop.close()
