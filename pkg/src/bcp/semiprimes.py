"""Enumeration of prime pairs p < q with pq <= x, chunked over p.

Every chunk is a contiguous run of p values, processed in ascending p and q,
and chunk results are concatenated or summed in chunk order, so output does
not depend on the worker count.  Workers build their own prime table in an
initializer rather than receiving it pickled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial
from typing import Callable

import numpy as np

from ._parallel import pmap, split_evenly
from .arith import inverse_mod_prime, primes_in_range, sieve_primes

TABLE_MAX = 5 * 10**7

_table: tuple[int, np.ndarray] | None = None


def _init_table(limit: int) -> None:
    global _table
    if _table is None or _table[0] != limit:
        _table = (limit, sieve_primes(max(2, limit)).primes)


def _partners(p: int, xi: int) -> np.ndarray:
    """Primes q with p < q <= xi // p."""
    hi = xi // p
    if hi <= p:
        return np.zeros(0, dtype=np.int64)
    if _table is not None and hi <= _table[0]:
        primes = _table[1]
        lo = np.searchsorted(primes, p, side="right")
        return primes[lo : np.searchsorted(primes, hi, side="right")]
    return primes_in_range(p + 1, hi)


@dataclass(frozen=True)
class Pairs:
    p: np.ndarray
    q: np.ndarray
    qbar: np.ndarray  # inverse of q modulo p, in [1, p)

    def __len__(self) -> int:
        return len(self.p)


def p_chunks(x: float, workers: int) -> list[list[int]]:
    xi = int(math.floor(x))
    ps = primes_in_range(2, math.isqrt(xi)).tolist()
    ps = [p for p in ps if xi // p > p]
    weights = [xi / (p * max(1.0, math.log(xi / p))) for p in ps]
    return split_evenly(ps, weights, max(1, 4 * workers) if workers > 1 else 1)


def table_limit(x: float) -> int:
    return min(int(math.floor(x)) // 2, TABLE_MAX)


def _collect_chunk(ps: list[int], xi: int, per_p: Callable):
    return [per_p(p, q, inverse_mod_prime(q, p)) for p in ps for q in [_partners(p, xi)]]


def _pairs_chunk(ps, xi):
    parts = _collect_chunk(ps, xi, lambda p, q, u: (np.full(len(q), p, dtype=np.int64), q, u))
    if not parts:
        z = np.zeros(0, dtype=np.int64)
        return z, z, z
    return tuple(np.concatenate(col) for col in zip(*parts))


def semiprime_pairs(x: float, workers: int = 1) -> Pairs:
    xi = int(math.floor(x))
    chunks = p_chunks(x, workers)
    if not chunks:
        z = np.zeros(0, dtype=np.int64)
        return Pairs(z, z, z)
    parts = pmap(partial(_pairs_chunk, xi=xi), chunks, workers, _init_table, (table_limit(x),))
    p, q, u = (np.concatenate(col) for col in zip(*parts))
    return Pairs(p, q, u)


def map_chunks(x: float, per_p: Callable, workers: int = 1) -> list:
    """Apply ``per_p(p, q_array, qbar_array)`` to every p; results in p order.

    ``per_p`` must be picklable when ``workers > 1``.
    """
    xi = int(math.floor(x))
    chunks = p_chunks(x, workers)
    out = pmap(partial(_collect_chunk, xi=xi, per_p=per_p), chunks, workers,
               _init_table, (table_limit(x),))
    return [r for chunk in out for r in chunk]
