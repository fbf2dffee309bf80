import asyncio
import concurrent.futures
from typing import Awaitable, Callable, Iterable, List, TypeVar

from aioitertools.asyncio import gather

from .config import BATCH_SIZE

T = TypeVar("T")
R = TypeVar("R")


def wait_for(coro: Awaitable[T]) -> T:
    """Run a coroutine to completion from synchronous code.

    Inside a running event loop the coroutine is run on a fresh loop in a
    worker thread.
    """
    try:
        asyncio.get_running_loop()
    except RuntimeError:
        return asyncio.run(coro)
    with concurrent.futures.ThreadPoolExecutor(max_workers=1) as pool:
        return pool.submit(asyncio.run, coro).result()


async def ordered_map(func: Callable[[T], R], items: Iterable[T], limit: int = BATCH_SIZE) -> List[R]:
    """Apply a blocking func to items in worker threads; results keep input order."""
    return await gather(*(asyncio.to_thread(func, item) for item in items), limit=limit)
