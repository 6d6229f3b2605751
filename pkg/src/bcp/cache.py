"""On-disk prime tables.

Layout (all little-endian)::

    b"BCPC"            magic, 4 bytes
    version            u32, currently 1
    limit              u64
    count              u64
    primes[count]      u64 each, ascending
"""

from __future__ import annotations

import os
import struct
from pathlib import Path

import numpy as np

from .arith import PrimeTable, sieve_primes
from .errors import CacheFormatError

MAGIC = b"BCPC"
VERSION = 1
_HEADER = struct.Struct("<4sIQQ")
ENV_VAR = "BCP_CACHE_DIR"


def write_prime_cache(path, table: PrimeTable) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = np.asarray(table.primes, dtype="<u8").tobytes()
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(_HEADER.pack(MAGIC, VERSION, table.limit, len(table.primes)) + body)
    os.replace(tmp, path)


def read_prime_cache(path) -> PrimeTable:
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise CacheFormatError(f"magic: expected {MAGIC!r}, found {data[:4]!r}")
    if len(data) < _HEADER.size:
        raise CacheFormatError(f"count mismatch: header truncated at {len(data)} bytes")
    magic, version, limit, count = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CacheFormatError(f"magic: expected {MAGIC!r}, found {magic!r}")
    if version != VERSION:
        raise CacheFormatError(f"version: expected {VERSION}, found {version}")
    if len(data) != _HEADER.size + 8 * count:
        raise CacheFormatError(
            f"count mismatch: header says {count} primes, body holds {(len(data) - _HEADER.size) / 8}"
        )
    primes = np.frombuffer(data, dtype="<u8", offset=_HEADER.size).astype(np.int64)
    if count > 1 and np.any(np.diff(primes) <= 0):
        raise CacheFormatError("order: primes are not strictly ascending")
    if count and primes[-1] > limit:
        raise CacheFormatError(f"limit: largest prime {primes[-1]} exceeds limit {limit}")
    primes.setflags(write=False)
    return PrimeTable(int(limit), primes)


def resolve_cache_dir(flag: str | None) -> Path | None:
    """The --cache-dir flag wins over the environment."""
    if flag:
        return Path(flag)
    env = os.environ.get(ENV_VAR)
    return Path(env) if env else None


def cached_primes(limit: int, cache_dir: Path | None) -> PrimeTable:
    if cache_dir is None:
        return sieve_primes(limit)
    path = Path(cache_dir) / f"primes_{limit}.bcpc"
    if path.exists():
        return read_prime_cache(path)
    table = sieve_primes(limit)
    write_prime_cache(path, table)
    return table
