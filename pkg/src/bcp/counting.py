"""Exact H_gamma(x): semiprimes pq <= x whose cyclotomic polynomial has at
most (pq)**(1/2+gamma) nonzero coefficients, against C(gamma) x**(1/2+gamma) / log x.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import partial

import numpy as np

from .analytic import Gamma, ScaleContext, c_gamma
from .arith import primes_in_range
from .cyclotomic import theta_direct
from .errors import CapacityError
from .semiprimes import map_chunks

log = logging.getLogger(__name__)

COUNT_LIMIT = 10**10
ORACLE_COUNT_LIMIT = 10**5
GUARD = 1e-12


@dataclass(frozen=True)
class CountRecord:
    x: float
    gamma: float
    h_exact: int
    h_predicted: float
    ratio: float
    pairs_scanned: int
    elapsed: float


def theta_passes_exact(theta: int, m: int, g: Fraction) -> bool:
    """theta <= m**(1/2 + g) for rational g = n/k, as theta**(2k) <= m**(k + 2n)."""
    n, k = g.numerator, g.denominator
    return theta ** (2 * k) <= m ** (k + 2 * n)


def _count_for_p(p, q, u, gamma, frac):
    """(passing, scanned) for one p; theta via the Carlitz closed form."""
    if len(q) == 0:
        return 0, 0
    m = p * q
    pbar = (m + 1 - q * u) // p
    theta = 2 * pbar * u - 1
    thr = m.astype(np.float64) ** (0.5 + gamma)
    th = theta.astype(np.float64)
    inside = th <= thr * (1 - GUARD)
    band = np.flatnonzero(~inside & (th < thr * (1 + GUARD)))
    passing = int(np.count_nonzero(inside))
    for k in band.tolist():
        ok = theta_passes_exact(int(theta[k]), int(m[k]), frac)
        log.info("threshold band pair p=%d q=%d theta=%d decided %s", p, int(q[k]), int(theta[k]), ok)
        passing += ok
    return passing, len(q)


def h_gamma_count(ctx: ScaleContext, g: Gamma, workers: int = 1, timing: bool = True) -> CountRecord:
    if ctx.x > COUNT_LIMIT:
        raise CapacityError(f"counting supports x <= 1e10, got {ctx.x}")
    start = time.perf_counter()
    per_p = partial(_count_for_p, gamma=g.value, frac=g.as_fraction())
    results = map_chunks(ctx.x, per_p, workers) if ctx.x >= 6 else []
    h = sum(r[0] for r in results)
    scanned = sum(r[1] for r in results)
    predicted = h_gamma_predicted(ctx, g)
    ratio = h / predicted if predicted > 0 else math.inf
    elapsed = time.perf_counter() - start if timing else 0.0
    return CountRecord(ctx.x, g.value, h, predicted, ratio, scanned, elapsed)


def h_gamma_predicted(ctx: ScaleContext, g: Gamma) -> float:
    return c_gamma(g) * ctx.x ** (0.5 + g.value) / math.log(ctx.x)


def h_gamma_count_oracle(x: float, g: Gamma) -> int:
    """Same count with theta from the dense cyclotomic oracle (x <= 1e5)."""
    if x > ORACLE_COUNT_LIMIT:
        raise CapacityError(f"oracle counting supports x <= 1e5, got {x}")
    xi = int(math.floor(x))
    frac = g.as_fraction()
    count = 0
    for p in primes_in_range(2, math.isqrt(xi)).tolist():
        for q in primes_in_range(p + 1, xi // p).tolist():
            theta = theta_direct(p * q)
            thr = (p * q) ** (0.5 + g.value)
            if abs(theta - thr) <= GUARD * thr:
                count += theta_passes_exact(theta, p * q, frac)
            else:
                count += theta < thr
    return count


def convergence_table(x_values, g: Gamma, workers: int = 1, timing: bool = True) -> list[CountRecord]:
    xs = sorted(float(x) for x in x_values)
    return [h_gamma_count(ScaleContext.at(x), g, workers, timing) for x in xs]
