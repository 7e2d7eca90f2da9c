from __future__ import annotations

import asyncio
import logging
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from typing import Any

from ccplan.harness.config import RunConfig
from ccplan.harness.results import RunResult
from ccplan.harness.runner import run_replicate

logger = logging.getLogger(__name__)


class ReplicatePool:
    """Runs replicates in worker processes; results come back in replicate order."""

    _workers: int
    _executor: Executor | None
    _use_threads: bool

    def __init__(self, workers: int = 1, use_threads: bool = False) -> None:
        if workers < 1:
            raise ValueError(f"workers must be at least 1, got {workers}")
        self._workers = workers
        self._executor = None
        self._use_threads = use_threads

    async def __aenter__(self) -> ReplicatePool:
        if self._use_threads:
            self._executor = ThreadPoolExecutor(max_workers=self._workers)
        else:
            self._executor = ProcessPoolExecutor(max_workers=self._workers)
        return self

    async def __aexit__(self, exc_type: type[BaseException] | None, *args: list[Any]) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=exc_type is None, cancel_futures=exc_type is not None)
            self._executor = None

    async def run(self, config: RunConfig) -> list[RunResult]:
        if self._executor is None:
            raise RuntimeError("ReplicatePool must be entered with 'async with' before running")
        loop = asyncio.get_running_loop()
        futures = [
            loop.run_in_executor(self._executor, run_replicate, config, index) for index in range(config.replicates)
        ]
        logger.debug("submitted %d replicates to %d workers", len(futures), self._workers)
        return list(await asyncio.gather(*futures))


async def run_replicates(config: RunConfig) -> list[RunResult]:
    async with ReplicatePool(config.workers) as pool:
        return await pool.run(config)


def run_replicates_blocking(config: RunConfig) -> list[RunResult]:
    """Entry point for synchronous callers such as the CLI."""
    return asyncio.run(run_replicates(config))
