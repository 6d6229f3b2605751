"""Distribution of the fractions qbar_p / p over xi-adic boxes.

For a box ``[P, P_hi) x [Q, Q_hi)`` the pairs are primes p < q in the box with
pq <= x.  R(P, Q) counts them, R_gamma(P, Q) counts those with
``qbar_p / p <= rho(PQ)``; the expected proportion is ``(PQ)**(g-1/2) / 2``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .analytic import (
    DyadicBox,
    Gamma,
    ScaleContext,
    classify_p_range,
    condition_check,
    rho,
    rho_discriminant,
    rho_main_term,
)
from .arith import box_index, dyadic_boxes, inverse_mod_prime, primes_in_range
from .errors import PreconditionError
from .semiprimes import semiprime_pairs

log = logging.getLogger(__name__)

EXACT, FALLBACK = "exact", "asymptotic-fallback"
GUARD = 1e-12


@dataclass(frozen=True)
class FractionSequence:
    box: DyadicBox
    points: np.ndarray
    pairs: int


@dataclass(frozen=True)
class DiscrepancyReport:
    N: int
    d_star: float
    a_parameter: int
    et_bound: float


@dataclass(frozen=True)
class BoxCheck:
    box: DyadicBox
    r_count: int
    r_gamma_count: int
    main_term: float
    rel_dev: float
    rho_mode: str
    cond1: bool | None = None
    cond2: bool | None = None


def box_pairs(box: DyadicBox, ctx: ScaleContext) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(p, q, qbar_p) for all pairs in the box, ascending in p then q."""
    xi = int(math.floor(ctx.x))
    ps = primes_in_range(math.ceil(box.P), math.ceil(box.P_hi))
    ps = ps[(ps >= box.P) & (ps < box.P_hi)]
    out_p, out_q, out_u = [], [], []
    for p in ps.tolist():
        hi = min(math.ceil(box.Q_hi), xi // p)
        qs = primes_in_range(max(math.ceil(box.Q), p + 1), hi)
        qs = qs[(qs >= box.Q) & (qs < box.Q_hi)]
        if len(qs):
            out_p.append(np.full(len(qs), p, dtype=np.int64))
            out_q.append(qs)
            out_u.append(inverse_mod_prime(qs, p))
    if not out_p:
        z = np.zeros(0, dtype=np.int64)
        return z, z, z
    return np.concatenate(out_p), np.concatenate(out_q), np.concatenate(out_u)


def inverse_fractions(box: DyadicBox, ctx: ScaleContext) -> FractionSequence:
    p, _, u = box_pairs(box, ctx)
    return FractionSequence(box, u / p, len(p))


def star_discrepancy(points) -> float:
    """sup over alpha of |#{points in [0, alpha)}/N - alpha|, from the sorted points."""
    x = np.sort(np.asarray(points, dtype=np.float64))
    n = len(x)
    if n == 0:
        raise PreconditionError("discrepancy of an empty sequence")
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - x), np.max(x - (i - 1) / n)))


def erdos_turan_bound(points, A: int) -> float:
    """``3 (1/(A+1) + (1/N) sum_{a<=A} |sum_n e(a x_n)| / a)``."""
    x = np.asarray(points, dtype=np.float64)
    n = len(x)
    if n == 0:
        raise PreconditionError("Erdos-Turan bound of an empty sequence")
    if A < 1:
        raise PreconditionError(f"A must be >= 1, got {A}")
    total = 0.0
    step = max(1, 4_000_000 // n)
    for start in range(1, A + 1, step):
        a = np.arange(start, min(A, start + step - 1) + 1, dtype=np.float64)
        frac = np.mod(a[:, None] * x[None, :], 1.0)
        s = np.abs(np.exp(2j * math.pi * frac).sum(axis=1))
        total += float(np.sum(s / a))
    return 3.0 * (1.0 / (A + 1) + total / n)


def default_a(box: DyadicBox) -> int:
    """A = P - 1, clamped to at least 1 for the smallest boxes."""
    return max(1, math.floor(box.P) - 1)


def discrepancy_report(points, A: int) -> DiscrepancyReport:
    return DiscrepancyReport(len(points), star_discrepancy(points), int(A), erdos_turan_bound(points, A))


def box_rho(box: DyadicBox, g: Gamma) -> tuple[float, str]:
    t = box.P * box.Q
    if t > 1 and rho_discriminant(t, g) >= 0:
        return rho(t, g), EXACT
    return rho_main_term(t, g), FALLBACK


def _count_below(p: np.ndarray, u: np.ndarray, r: float | np.ndarray) -> int:
    bound = r * p
    hit = np.abs(u - bound) <= GUARD * bound
    if np.any(hit):
        for k in np.flatnonzero(hit).tolist():
            log.info("pair in rho guard band: p=%d qbar=%d", int(p[k]), int(u[k]))
    return int(np.count_nonzero((u <= bound) | hit))


def _check(box, r_count, r_gamma, g, mode) -> BoxCheck:
    main = 0.5 * (box.P * box.Q) ** (g.value - 0.5) * r_count
    rel = abs(r_gamma - main) / max(1.0, main)
    return BoxCheck(box, int(r_count), int(r_gamma), main, rel, mode)


def box_counts(box: DyadicBox, ctx: ScaleContext, g: Gamma) -> BoxCheck:
    p, _, u = box_pairs(box, ctx)
    r, mode = box_rho(box, g)
    return _check(box, len(p), _count_below(p, u, r), g, mode)


def r_gamma_by_progressions(box: DyadicBox, ctx: ScaleContext, g: Gamma) -> int:
    """R_gamma(P, Q) counted through residue classes.

    For each p, E(p) is the set of classes s mod p with ``sbar_p <= rho p``;
    the count is the number of primes q in the window lying in those classes,
    taken as pi(z; p, s) - pi(y - 1; p, s).
    """
    r, _ = box_rho(box, g)
    xi = int(math.floor(ctx.x))
    ps = primes_in_range(math.ceil(box.P), math.ceil(box.P_hi))
    ps = ps[(ps >= box.P) & (ps < box.P_hi)]
    total = 0
    for p in ps.tolist():
        lo = max(math.ceil(box.Q), p + 1)
        hi = min(math.ceil(box.Q_hi) - 1, xi // p)
        if hi < lo:
            continue
        u_max = math.floor(r * p * (1 + GUARD))
        if u_max < 1:
            continue
        classes = inverse_mod_prime(np.arange(1, min(u_max, p - 1) + 1), p)
        primes_to_hi = primes_in_range(2, hi)
        primes_below = primes_to_hi[primes_to_hi <= lo - 1]
        pi_hi = np.bincount(primes_to_hi % p, minlength=p)
        pi_lo = np.bincount(primes_below % p, minlength=p)
        total += int(np.sum(pi_hi[classes] - pi_lo[classes]))
    return total


def box_sweep(
    ctx: ScaleContext,
    g: Gamma,
    workers: int = 1,
    threshold_exponent: float = 100,
    eps: float = 1e-3,
) -> list[BoxCheck]:
    """BoxCheck for every admissible box, from one pass over all pairs.

    Pairs are binned with the same float edges that define the boxes, which
    makes the binning an exact partition.
    """
    grid = dyadic_boxes(ctx, g)
    if not grid.boxes:
        return []
    n = len(grid.edges)
    keys = np.array([b.i * n + b.j for b in grid.boxes], dtype=np.int64)
    pairs = semiprime_pairs(ctx.x, workers)
    pair_keys = box_index(pairs.p, grid.edges) * n + box_index(pairs.q, grid.edges)
    pos = np.searchsorted(keys, pair_keys)
    pos_c = np.minimum(pos, len(keys) - 1)
    inside = keys[pos_c] == pair_keys
    idx = pos_c[inside]
    p, u = pairs.p[inside], pairs.qbar[inside]

    rhos = [box_rho(b, g) for b in grid.boxes]
    r_of_pair = np.array([r for r, _ in rhos])[idx]
    bound = r_of_pair * p
    hit = np.abs(u - bound) <= GUARD * bound
    for k in np.flatnonzero(hit).tolist():
        log.info("pair in rho guard band: p=%d qbar=%d", int(p[k]), int(u[k]))
    below = (u <= bound) | hit

    r_counts = np.bincount(idx, minlength=len(keys))
    rg_counts = np.bincount(idx, weights=below, minlength=len(keys)).astype(np.int64)
    out = []
    for b, (_, mode), rc, rg in zip(grid.boxes, rhos, r_counts.tolist(), rg_counts.tolist()):
        cc = condition_check(b.P, ctx, g, eps)
        chk = _check(b, rc, rg, g, mode)
        box = b if threshold_exponent == 100 else DyadicBox(
            b.P, b.Q, b.P_hi, b.Q_hi, b.admissible, classify_p_range(b.P, ctx, threshold_exponent), b.i, b.j
        )
        out.append(BoxCheck(box, chk.r_count, chk.r_gamma_count, chk.main_term, chk.rel_dev,
                            chk.rho_mode, cc.cond1, cc.cond2))
    return out


def admissible_pair_count(ctx: ScaleContext, g: Gamma, workers: int = 1) -> tuple[int, int]:
    """(pairs inside admissible boxes, all pairs) by direct enumeration."""
    grid = dyadic_boxes(ctx, g)
    n = len(grid.edges)
    keys = set(b.i * n + b.j for b in grid.boxes)
    pairs = semiprime_pairs(ctx.x, workers)
    pk = box_index(pairs.p, grid.edges) * n + box_index(pairs.q, grid.edges)
    return int(sum(1 for k in pk.tolist() if k in keys)), len(pairs)


def pair_level_count(ctx: ScaleContext, g: Gamma, workers: int = 1) -> int:
    """H_gamma(x) through the fractions w = qbar_p / p alone.

    With t = pq, theta = 2 t w (1 + 1/t - w) - 1 is a downward parabola in w,
    so theta <= t**(1/2+g) iff w <= rho(t) or w >= 1 + 1/t - rho(t), and for
    every w when the discriminant is negative.  The per-box count R_gamma uses
    only the lower branch and the corner value rho(PQ), which is why it tracks
    about half of H rather than H itself.
    """
    from .counting import theta_passes_exact

    pairs = semiprime_pairs(ctx.x, workers)
    if len(pairs) == 0:
        return 0
    t = (pairs.p * pairs.q).astype(np.float64)
    w = pairs.qbar / pairs.p
    b = 1.0 + 1.0 / t
    c = 2.0 / t * (t ** (0.5 + g.value) + 1.0)
    disc = b * b - c
    ok = disc < 0
    live = ~ok
    r = np.zeros_like(t)
    r[live] = c[live] / (2.0 * (b[live] + np.sqrt(disc[live])))
    lower = w <= r
    upper = w >= b - r
    near = live & ((np.abs(w - r) <= 1e-9 * r) | (np.abs(w - (b - r)) <= 1e-9))
    count = int(np.count_nonzero(ok | (live & ~near & (lower | upper))))
    frac = g.as_fraction()
    for k in np.flatnonzero(near).tolist():
        p, q, u = int(pairs.p[k]), int(pairs.q[k]), int(pairs.qbar[k])
        theta = 2 * u * ((p * q + 1 - q * u) // p) - 1
        count += theta_passes_exact(theta, p * q, frac)
    return count
