from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def pmap(
    func: Callable[[T], R],
    items: Iterable[T],
    workers: int = 1,
    initializer: Callable | None = None,
    initargs: tuple = (),
) -> list[R]:
    """Ordered map; results come back in input order whatever ``workers`` is.

    Callers reduce the returned list left to right, so integer results are
    identical for any worker count and float results differ only if a caller
    reorders them.
    """
    items = list(items)
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if workers == 1 or len(items) <= 1:
        if initializer is not None:
            initializer(*initargs)
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers, initializer=initializer, initargs=initargs) as pool:
        return list(pool.map(func, items, chunksize=max(1, len(items) // (4 * workers))))


def split_evenly(values: list, weights: list[float], parts: int) -> list[list]:
    """Cut ``values`` into at most ``parts`` contiguous runs of similar total weight."""
    if not values:
        return []
    total = float(sum(weights))
    target = total / max(parts, 1)
    chunks, current, acc = [], [], 0.0
    for v, w in zip(values, weights):
        current.append(v)
        acc += w
        if acc >= target and len(chunks) < parts - 1:
            chunks.append(current)
            current, acc = [], 0.0
    if current:
        chunks.append(current)
    return chunks
