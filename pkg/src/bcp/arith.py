"""Integer substrate: prime sieving, modular inverses, totients, xi-adic boxes.

Prime arrays are ``numpy.int64`` throughout.  Products ``p*q`` of desk-scale
primes (``p, q <= 2**31``) stay far below ``2**63``; anything that could
leave that range goes through Python integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapacityError, DomainError

SIEVE_LIMIT_GUARD = 2**40
SEGMENT_GUARD = 2**32
_SEGMENT = 1 << 22


@dataclass(frozen=True)
class PrimeTable:
    limit: int
    primes: np.ndarray

    def __len__(self) -> int:
        return len(self.primes)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PrimeTable):
            return NotImplemented
        return self.limit == other.limit and np.array_equal(self.primes, other.primes)

    __hash__ = None  # type: ignore[assignment]


def _simple_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


@lru_cache(maxsize=16)
def _base_primes(limit: int) -> np.ndarray:
    out = _simple_sieve(limit)
    out.setflags(write=False)
    return out


def _sieve_segment(lo: int, hi: int, base: np.ndarray) -> np.ndarray:
    """Primes in [lo, hi) given every prime <= sqrt(hi - 1) in ``base``."""
    mark = np.ones(hi - lo, dtype=bool)
    if lo < 2:
        mark[: 2 - lo] = False
    for p in base.tolist():
        pp = p * p
        if pp >= hi:
            break
        start = max(pp, -(-lo // p) * p)
        mark[start - lo :: p] = False
    return np.flatnonzero(mark).astype(np.int64) + lo


def primes_in_range(lo: int, hi: int) -> np.ndarray:
    """Primes ``q`` with ``lo <= q <= hi`` by a segmented sieve."""
    lo, hi = int(lo), int(hi)
    if lo < 2:
        lo = 2
    if hi < lo:
        return np.zeros(0, dtype=np.int64)
    if hi - lo > SEGMENT_GUARD:
        raise CapacityError(f"segment [{lo}, {hi}] exceeds 2**32 integers")
    base = _base_primes(math.isqrt(hi))
    chunks = []
    start = lo
    while start <= hi:
        stop = min(start + _SEGMENT, hi + 1)
        chunks.append(_sieve_segment(start, stop, base))
        start = stop
    return np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.int64)


def sieve_primes(limit: int) -> PrimeTable:
    """All primes up to ``limit`` inclusive."""
    limit = int(limit)
    if limit < 2:
        raise DomainError(f"sieve limit must be >= 2, got {limit}")
    if limit > SIEVE_LIMIT_GUARD:
        raise CapacityError(f"sieve limit {limit} exceeds guard 2**40")
    if limit <= _SEGMENT:
        primes = _simple_sieve(limit)
    else:
        primes = primes_in_range(2, limit)
    primes.setflags(write=False)
    return PrimeTable(limit, primes)


def prime_pi(primes: np.ndarray, v: float) -> int:
    """Number of entries of the sorted array ``primes`` that are <= v."""
    return int(np.searchsorted(primes, math.floor(v), side="right"))


def mod_inverse(k: int, ell: int) -> int:
    """The unique integer in [1, ell) inverting ``k`` modulo ``ell``."""
    if ell < 2:
        raise DomainError(f"modulus must be >= 2, got {ell}")
    try:
        return pow(int(k), -1, int(ell))
    except ValueError:
        raise DomainError(f"{k} is not invertible modulo {ell}") from None


def inverse_table(p: int) -> np.ndarray:
    """``inv[u]`` = inverse of u modulo the prime ``p`` (``inv[0] = 0``)."""
    return inverse_mod_prime(np.arange(p, dtype=np.int64), p)


def inverse_mod_prime(values: np.ndarray, p: int) -> np.ndarray:
    """Elementwise inverse modulo the prime ``p`` by Fermat, ``v**(p-2)``.

    Values divisible by p map to 0.  For p < 2**31 every product stays below
    2**62; larger moduli fall back to Python integers.
    """
    values = np.asarray(values, dtype=np.int64) % p
    if p >= 1 << 31:
        return np.array([pow(int(v), p - 2, p) for v in values], dtype=np.int64)
    result = np.ones_like(values)
    base = values.copy()
    e = p - 2
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    if p == 2:
        result = values.copy()
    return result


def factorize(m: int, table: PrimeTable | None = None) -> dict[int, int]:
    """Prime factorization by trial division over a prime table."""
    m = int(m)
    if m < 1:
        raise DomainError(f"cannot factor {m}")
    if table is None:
        table = sieve_primes(max(2, min(math.isqrt(m), 10**7)))
    out: dict[int, int] = {}
    for p in table.primes.tolist():
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out[p] = e
    if m > 1:
        if m >= (table.limit + 1) ** 2:
            raise CapacityError(f"cofactor {m} exceeds prime table support {table.limit}")
        out[m] = out.get(m, 0) + 1
    return out


def euler_phi(m: int, table: PrimeTable | None = None) -> int:
    if m > 2**63:
        raise CapacityError(f"euler_phi argument {m} exceeds 2**63")
    phi = 1
    for p, e in factorize(m, table).items():
        phi *= (p - 1) * p ** (e - 1)
    return phi


def moebius(m: int) -> int:
    fac = factorize(m)
    if any(e > 1 for e in fac.values()):
        return 0
    return -1 if len(fac) % 2 else 1


def divisors(m: int) -> list[int]:
    out = [1]
    for p, e in factorize(m).items():
        out = [d * p**k for d in out for k in range(e + 1)]
    return sorted(out)


def is_prime(n: int) -> bool:
    n = int(n)
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


# --- xi-adic boxes -----------------------------------------------------------


def grid_edges(xi: float, upper: float) -> np.ndarray:
    """Box edges ``xi**k`` for k = 0, 1, ... until an edge exceeds ``upper``.

    Membership of an integer u in box k is ``edges[k] <= u < edges[k+1]``; the
    same float edges are used everywhere so the partition is exact.
    """
    n = int(math.ceil(math.log(max(upper, 2.0)) / math.log(xi))) + 2
    edges = xi ** np.arange(n + 1, dtype=np.float64)
    return edges


def box_index(values: np.ndarray, edges: np.ndarray) -> np.ndarray:
    return np.searchsorted(edges, np.asarray(values, dtype=np.float64), side="right") - 1


@dataclass(frozen=True)
class BoxGrid:
    x: float
    gamma: object
    boxes: list
    edges: np.ndarray


def dyadic_boxes(ctx, g) -> BoxGrid:
    """All admissible xi-adic boxes ``[xi**i, xi**(i+1)) x [xi**j, xi**(j+1))``.

    Only boxes that can hold a pair p < q with pq <= x are produced: the P side
    must reach 2 and the lower corners must satisfy ``P*Q <= x``.
    """
    from .analytic import DyadicBox, box_admissible, classify_p_range

    if ctx.x < 4:
        raise DomainError(f"dyadic_boxes needs x >= 4, got {ctx.x}")
    edges = grid_edges(ctx.xi, ctx.x)
    n = len(edges) - 1
    first = int(np.searchsorted(edges, 2.0, side="right")) - 1
    boxes = []
    for i in range(first, n):
        P = float(edges[i])
        if P * P > ctx.x * ctx.xi:
            break
        for j in range(i, n):
            Q = float(edges[j])
            if P * Q > ctx.x:
                break
            if box_admissible(P, Q, ctx, g):
                boxes.append(
                    DyadicBox(
                        P=P,
                        Q=Q,
                        P_hi=float(edges[i + 1]),
                        Q_hi=float(edges[j + 1]),
                        admissible=True,
                        range_class=classify_p_range(P, ctx),
                        i=i,
                        j=j,
                    )
                )
    return BoxGrid(ctx.x, g, boxes, edges)
