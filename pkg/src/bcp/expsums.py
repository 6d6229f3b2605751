"""Kloosterman-type exponential sums over primes.

All phases are evaluated as ``exp(2*pi*i * r / m)`` with the integer numerator
reduced mod m first, so each term carries a phase error of a few ulps
regardless of how large ``a`` is.  Bound reports compare an observed sum with
the main factor of the corresponding published bound; the unspecified
``p**o(1)`` factors are set to 1, so the ratios are diagnostics, not tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from ._parallel import pmap
from .analytic import ScaleContext
from .arith import inverse_mod_prime, primes_in_range
from .errors import PreconditionError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SumValue:
    re: float
    im: float
    terms: int

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    def __abs__(self) -> float:
        return math.hypot(self.re, self.im)

    @classmethod
    def of(cls, z: complex, terms: int) -> "SumValue":
        return cls(float(z.real), float(z.imag), int(terms))


@dataclass(frozen=True)
class BoundReport:
    lemma: str
    P: float
    Q: float
    y: float
    z: float
    a_min: int
    a_max: int
    observed: float
    reference: float
    ratio: float
    terms: int


def _report(lemma, P, Q, y, z, a_min, a_max, observed, reference, terms) -> BoundReport:
    return BoundReport(
        lemma, float(P), float(Q), float(y), float(z), int(a_min), int(a_max),
        float(observed), float(reference), float(observed) / float(reference), int(terms),
    )


def phases(r: np.ndarray, m: int) -> np.ndarray:
    """``exp(2 pi i r/m)`` for an integer array ``r``."""
    r = np.asarray(r, dtype=np.int64) % m
    return np.exp(1j * (TWO_PI / m) * r)


def unit_phase(a: int, m: int) -> complex:
    if m < 1:
        raise PreconditionError(f"modulus must be >= 1, got {m}")
    r = int(a) % int(m)
    if r == 0:
        return complex(1.0, 0.0)
    angle = TWO_PI * r / m
    return complex(math.cos(angle), math.sin(angle))


def _window_primes(y: float, z: float, exclude: int | None = None) -> np.ndarray:
    q = primes_in_range(math.ceil(y), math.floor(z))
    if exclude is not None:
        q = q[q != exclude]
    return q


def _check_unit(p: int, a: int) -> None:
    if int(a) % int(p) == 0:
        raise PreconditionError(f"a = {a} is divisible by p = {p}")


def _inverse_residues(p: int, y: float, z: float) -> np.ndarray:
    """qbar_p for the primes q != p in [y, z], ascending in q."""
    return inverse_mod_prime(_window_primes(y, z, exclude=p), p)


def kloosterman_prime_sum(p: int, a: int, y: float, z: float) -> SumValue:
    """S_p(a; y, z): sum over primes y <= q <= z, q != p, of e_p(a * qbar_p)."""
    _check_unit(p, a)
    if not 1 <= y <= z:
        raise PreconditionError(f"need 1 <= y <= z, got y={y}, z={z}")
    u = _inverse_residues(p, y, z)
    if len(u) == 0:
        return SumValue(0.0, 0.0, 0)
    return SumValue.of(phases((int(a) % p) * u, p).sum(), len(u))


def complete_kloosterman(p: int, a: int, b: int) -> SumValue:
    x = np.arange(1, p, dtype=np.int64)
    xbar = inverse_mod_prime(x, p)
    r = (int(a) % p) * x + (int(b) % p) * xbar
    return SumValue.of(phases(r, p).sum(), p - 1)


def kloosterman_matrix(p: int) -> np.ndarray:
    """All K_p(a, b), 0 <= a, b < p, as a 2-D DFT of the graph of x -> xbar."""
    x = np.arange(1, p, dtype=np.int64)
    m = np.zeros((p, p))
    m[x, inverse_mod_prime(x, p)] = 1.0
    return np.fft.ifft2(m) * (p * p)


def bilinear_sum(alpha, beta, a: int, P_primes, Q_primes) -> SumValue:
    """Sum over p, q (q != p) of alpha_p beta_q e_p(a qbar_p)."""
    alpha = np.asarray(alpha, dtype=np.complex128)
    beta = np.asarray(beta, dtype=np.complex128)
    P_primes = np.asarray(P_primes, dtype=np.int64)
    Q_primes = np.asarray(Q_primes, dtype=np.int64)
    if alpha.shape != P_primes.shape or beta.shape != Q_primes.shape:
        raise PreconditionError("coefficient lists must align with the prime lists")
    if np.any(np.abs(alpha) > 1 + 1e-12) or np.any(np.abs(beta) > 1 + 1e-12):
        raise PreconditionError("coefficients must lie in the closed unit disc")
    total = 0j
    terms = 0
    for p, al in zip(P_primes.tolist(), alpha.tolist()):
        keep = Q_primes != p
        qs = Q_primes[keep]
        if len(qs) == 0:
            continue
        u = inverse_mod_prime(qs, p)
        total += al * np.dot(beta[keep], phases((int(a) % p) * u, p))
        terms += len(qs)
    return SumValue.of(total, terms)


def dfi_reference(P: float, Q: float) -> float:
    return math.sqrt(P * Q) * (math.sqrt(P) + math.sqrt(Q) + min(P, Q))


def bilinear_report(alpha, beta, a: int, P_primes, Q_primes, P=None, Q=None) -> tuple[SumValue, BoundReport]:
    """Bilinear sum together with its report against the bilinear bound.

    ``P`` and ``Q`` default to the smallest primes of each list.
    """
    P = float(min(P_primes)) if P is None else float(P)
    Q = float(min(Q_primes)) if Q is None else float(Q)
    if not 1 <= a <= P * Q:
        raise PreconditionError(f"need 1 <= a <= PQ = {P * Q}, got {a}")
    s = bilinear_sum(alpha, beta, a, P_primes, Q_primes)
    rep = _report("dfi_bilinear", P, Q, min(Q_primes), max(Q_primes), a, a,
                  abs(s), dfi_reference(P, Q), s.terms)
    return s, rep


@dataclass(frozen=True)
class CompletionCheck:
    direct: SumValue
    completed: SumValue
    max_abs_diff: float


def completed_sum_decomposition(p: int, a: int, y: float, z: float) -> CompletionCheck:
    """S_p(a; y, z) both directly and through additive-character completion.

    With ``N = ceil(2y)`` the window indicator of q is
    ``(1/N) sum_{h=1..N} sum_{y<=k<=z} e_N(h(q - k))``, and q runs over the
    primes in ``[y, N]``, so ``|q - k| < N`` and only ``k = q`` survives.
    """
    direct = kloosterman_prime_sum(p, a, y, z)
    N = math.ceil(2 * y)
    if z > N:
        raise PreconditionError(f"completion needs z <= ceil(2y) = {N}, got z={z}")
    q = _window_primes(y, N, exclude=p)
    k = np.arange(math.ceil(y), math.floor(z) + 1, dtype=np.int64)
    if len(q) == 0 or len(k) == 0:
        return CompletionCheck(direct, SumValue(0.0, 0.0, 0), abs(direct))
    w = phases((int(a) % p) * inverse_mod_prime(q, p), p)
    h = np.arange(1, N + 1, dtype=np.int64)
    total = 0j
    # blocks of h keep the (h, k) and (h, q) phase tables small
    step = max(1, 2_000_000 // max(len(k), len(q)))
    for start in range(0, N, step):
        hb = h[start : start + step, None]
        a_h = phases(-(hb * k[None, :]), N).sum(axis=1)
        b_h = phases(hb * q[None, :], N) @ w
        total += np.dot(a_h, b_h)
    completed = SumValue.of(total / N, direct.terms)
    return CompletionCheck(direct, completed, abs(direct.value - completed.value))


def max_over_a(p: int, y: float, z: float) -> tuple[float, int]:
    """max over 1 <= a < p of |S_p(a; y, z)|, and the number of terms.

    S_p(a) = sum_u c[u] e(a u / p) with c the histogram of qbar_p, so all p - 1
    values come from one FFT.
    """
    u = _inverse_residues(p, y, z)
    if len(u) == 0:
        return 0.0, 0
    counts = np.bincount(u, minlength=p).astype(np.float64)
    s = np.fft.ifft(counts) * p
    return float(np.abs(s[1:]).max()), len(u)


def kc_window_ok(p: int, y: float, z: float) -> bool:
    return p ** (12 / 13) <= z <= p**1.5 and 1 <= y <= z <= 2 * y


def kc_bound_report(p: int, y: float, z: float) -> BoundReport:
    if not kc_window_ok(p, y, z):
        raise PreconditionError(
            f"window outside p^(12/13) <= z <= p^(3/2), 1 <= y <= z <= 2y: p={p}, y={y}, z={z}"
        )
    observed, terms = max_over_a(p, y, z)
    return _report("korolev_changa", p, p, y, z, 1, p - 1, observed, y ** (15 / 16), terms)


def irving_reference(P: float, Q: float) -> float:
    return Q ** (5 / 8) * P ** (5 / 4) + Q ** (9 / 10) * P + Q ** (13 / 18) * P ** (7 / 6)


def default_windows(P: float, Q: float, ctx: ScaleContext) -> list[tuple[int, float, float]]:
    """``(p, max(Q, p), min(xi Q, x/p))`` for every prime P < p <= 2P."""
    out = []
    for p in primes_in_range(math.floor(P) + 1, math.floor(2 * P)).tolist():
        out.append((p, max(Q, float(p)), min(ctx.xi * Q, ctx.x / p)))
    return out


def _check_windows(Q: float, windows) -> list[tuple[int, float, float]]:
    live = []
    for p, y, z in windows:
        if y > z:
            continue
        if not Q <= y <= z <= 2 * Q:
            raise PreconditionError(f"window for p={p} not inside [Q, 2Q]: y={y}, z={z}, Q={Q}")
        live.append((int(p), float(y), float(z)))
    return live


def _max_over_a_task(item):
    p, y, z = item
    return max_over_a(p, y, z)


def irving_average_report(P: float, Q: float, windows, workers: int = 1) -> BoundReport:
    """Sum over primes P < p <= 2P of max_a |S_p(a; y_p, z_p)|.

    ``windows`` is a sequence of ``(p, y_p, z_p)``; empty windows (y_p > z_p)
    contribute nothing.
    """
    if not P**1.5 >= 2 * Q >= (2 * P) ** (2 / 3):
        raise PreconditionError(f"need P^(3/2) >= 2Q >= (2P)^(2/3), got P={P}, Q={Q}")
    live = _check_windows(Q, windows)
    for p, _, _ in live:
        if not P < p <= 2 * P:
            raise PreconditionError(f"prime {p} outside (P, 2P] for P={P}")
    parts = pmap(_max_over_a_task, live, workers)
    observed = sum(v for v, _ in parts)
    terms = sum(n for _, n in parts)
    y = min((w[1] for w in live), default=Q)
    z = max((w[2] for w in live), default=Q)
    return _report("irving", P, Q, y, z, 1, math.floor(2 * P) - 1, observed, irving_reference(P, Q), terms)


def _abs_sum_task(item, a):
    p, y, z = item
    if a % p == 0:
        raise PreconditionError(f"a = {a} is divisible by p = {p}")
    s = kloosterman_prime_sum(p, a, y, z)
    return abs(s), s.terms


def dfi_average_report(P: float, Q: float, windows, a: int, workers: int = 1) -> BoundReport:
    """Sum over P < p <= 2P of |S_p(a; y_p, z_p)| for one fixed a <= PQ."""
    if not 1 <= a <= P * Q:
        raise PreconditionError(f"need 1 <= a <= PQ = {P * Q}, got {a}")
    live = _check_windows(Q, windows)
    parts = pmap(partial(_abs_sum_task, a=int(a)), live, workers)
    observed = sum(v for v, _ in parts)
    terms = sum(n for _, n in parts)
    y = min((w[1] for w in live), default=Q)
    z = max((w[2] for w in live), default=Q)
    return _report("dfi_average", P, Q, y, z, a, a, observed, dfi_reference(P, Q), terms)
