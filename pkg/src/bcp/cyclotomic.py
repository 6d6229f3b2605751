"""Exact cyclotomic coefficients and the nonzero-coefficient count theta(m).

``cyclotomic_coeffs`` is the ground-truth oracle: it builds
``Phi_m(x) = prod_{d | m} (x**d - 1)**mu(m/d)`` in exact int64 arithmetic,
multiplying out the numerator first and then dividing by each denominator
factor with a zero-remainder check.  ``theta_carlitz`` is the closed form for
binary m = pq, which is what large-scale counting uses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arith import divisors, euler_phi, is_prime, mod_inverse, moebius
from .errors import CapacityError, DomainError

ORACLE_LIMIT = 10**5


@dataclass(frozen=True)
class CyclotomicPoly:
    m: int
    coeffs: np.ndarray  # coeffs[i] multiplies x**i

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class PrimePair:
    p: int
    q: int
    inv_q_mod_p: int
    inv_p_mod_q: int
    theta: int


def _mul_xd_minus_1(c: np.ndarray, d: int) -> np.ndarray:
    out = np.zeros(len(c) + d, dtype=np.int64)
    out[d:] += c
    out[: len(c)] -= c
    return out


def _div_xd_minus_1(c: np.ndarray, d: int) -> np.ndarray:
    """Exact quotient of ``c`` by ``x**d - 1``.

    From ``c = q (x**d - 1)`` we get ``q[i] = q[i-d] - c[i]``, i.e. q is minus
    the running sum of c over residue classes mod d, taken in blocks of d.
    """
    n = len(c)
    blocks = -(-n // d)
    padded = np.zeros(blocks * d, dtype=np.int64)
    padded[:n] = c
    q = -np.cumsum(padded.reshape(blocks, d), axis=0).reshape(-1)[:n]
    deg = n - 1 - d
    if deg < 0 or np.any(q[deg + 1 :]):
        raise AssertionError(f"nonzero remainder dividing by x^{d} - 1")
    return q[: deg + 1]


def cyclotomic_coeffs(m: int) -> CyclotomicPoly:
    m = int(m)
    if not 1 <= m <= ORACLE_LIMIT:
        raise CapacityError(f"oracle supports 1 <= m <= {ORACLE_LIMIT}, got {m}")
    num, den = [], []
    for d in divisors(m):
        mu = moebius(m // d)
        if mu == 1:
            num.append(d)
        elif mu == -1:
            den.append(d)
    c = np.ones(1, dtype=np.int64)
    for d in num:
        c = _mul_xd_minus_1(c, d)
    for d in den:
        c = _div_xd_minus_1(c, d)
    return CyclotomicPoly(m, c)


def theta_direct(m: int) -> int:
    return int(np.count_nonzero(cyclotomic_coeffs(m).coeffs))


def _check_pair(p: int, q: int) -> None:
    if p >= q:
        raise DomainError(f"need p < q, got p={p}, q={q}")
    for v in (p, q):
        if not is_prime(v):
            raise DomainError(f"{v} is not prime")


def theta_carlitz(p: int, q: int) -> PrimePair:
    """theta(pq) = 2 * pbar_q * qbar_p - 1."""
    p, q = int(p), int(q)
    _check_pair(p, q)
    qbar = mod_inverse(q, p)
    pbar = mod_inverse(p, q)
    return PrimePair(p, q, qbar, pbar, 2 * pbar * qbar - 1)


@dataclass(frozen=True)
class StructureCheck:
    migotti_ok: bool
    bounds_ok: bool
    carlitz_ok: bool

    def __bool__(self) -> bool:
        return self.migotti_ok and self.bounds_ok and self.carlitz_ok


def binary_structure_check(p: int, q: int) -> StructureCheck:
    _check_pair(int(p), int(q))
    coeffs = cyclotomic_coeffs(p * q).coeffs
    theta = int(np.count_nonzero(coeffs))
    return StructureCheck(
        migotti_ok=bool(np.all(np.abs(coeffs) <= 1)),
        bounds_ok=1 <= theta <= euler_phi(p * q) + 1,
        carlitz_ok=theta == theta_carlitz(p, q).theta,
    )
