"""Hard invariants of every module, run as one suite by ``bcp verify``.

Each check returns a short witness summary on success and raises
:class:`VerificationError` on the first violation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import analytic, arith, counting, cyclotomic, equidist, expsums
from .errors import DomainError, VerificationError


@dataclass(frozen=True)
class CheckResult:
    module: str
    invariant: str
    witness: str


def _fail(module, invariant, **witness):
    raise VerificationError(module, invariant, witness)


def check_sieve(limit: int = 20_000) -> str:
    primes = arith.sieve_primes(limit).primes.tolist()
    expected = [n for n in range(2, limit + 1) if arith.is_prime(n)]
    if primes != expected:
        bad = next(a for a, b in zip(primes + [None], expected + [None]) if a != b)
        _fail("arith", "sieve_matches_trial_division", limit=limit, first_difference=bad)
    return f"pi({limit}) = {len(primes)}"


def check_inverses(limit: int = 500) -> str:
    for p in arith.sieve_primes(limit).primes.tolist():
        inv = arith.inverse_table(p)
        k = np.arange(1, p)
        if np.any((k * inv[1:]) % p != 1):
            _fail("arith", "inverse_table", p=p)
    return f"all p <= {limit}"


def check_carlitz(limit: int = 3000) -> str:
    pairs = 0
    for p in arith.primes_in_range(2, math.isqrt(limit)).tolist():
        for q in arith.primes_in_range(p + 1, limit // p).tolist():
            s = cyclotomic.binary_structure_check(p, q)
            if not s:
                _fail("cyclotomic", "migotti_bounds_carlitz", p=p, q=q, check=s)
            pairs += 1
    return f"{pairs} pairs with pq <= {limit}"


def check_complement(limit: int = 600) -> str:
    ps = arith.sieve_primes(limit).primes.tolist()
    for i, p in enumerate(ps):
        for q in ps[i + 1 :]:
            if p * arith.mod_inverse(p, q) + q * arith.mod_inverse(q, p) != p * q + 1:
                _fail("cyclotomic", "complement_identity", p=p, q=q)
    return f"all p < q <= {limit}"


def check_rho(points: int = 200) -> str:
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(points):
        g = float(rng.uniform(0.05, 0.49))
        t = float(10 ** rng.uniform(0, 6)) * analytic.rho_threshold(g) * 4
        res = analytic.rho_residual(t, analytic.rho(t, g), g)
        worst = max(worst, res)
        if res > 1e-9:
            _fail("analytic", "rho_residual", t=t, gamma=g, residual=res)
    try:
        analytic.rho(1e6, 0.45)
    except DomainError:
        pass
    else:
        _fail("analytic", "rho_domain_error", t=1e6, gamma=0.45)
    return f"max residual {worst:.2e}"


def check_gamma_zero() -> str:
    if analytic.h_exponent(Fraction(9, 20)) != Fraction(1, 2):
        _fail("analytic", "h_at_nine_twentieths", value=analytic.h_exponent(Fraction(9, 20)))
    g0 = analytic.gamma_zero()
    if abs(g0 - 0.45) > 1e-12:
        _fail("analytic", "gamma_zero", value=g0)
    return f"gamma_0 = {g0!r}"


def check_counts(limit: int = 5000) -> str:
    for g, want in ((0.25, 5), (0.49, 10)):
        got = counting.h_gamma_count(analytic.ScaleContext.at(35), analytic.Gamma(g), timing=False).h_exact
        if got != want:
            _fail("counting", "desk_count_35", gamma=g, expected=want, got=got)
    for g in (0.1, 0.3, 0.45):
        fast = counting.h_gamma_count(analytic.ScaleContext.at(limit), analytic.Gamma(g), timing=False).h_exact
        slow = counting.h_gamma_count_oracle(limit, analytic.Gamma(g))
        if fast != slow:
            _fail("counting", "carlitz_count_matches_oracle", x=limit, gamma=g, carlitz=fast, oracle=slow)
    return f"x <= {limit}"


def check_weil(limit: int = 150) -> str:
    for p in arith.sieve_primes(limit).primes.tolist():
        k = np.abs(expsums.kloosterman_matrix(p)[1:, 1:])
        if k.max() > 2 * math.sqrt(p) + 1e-9:
            a, b = np.unravel_index(int(k.argmax()), k.shape)
            _fail("expsums", "weil_bound", p=p, a=int(a) + 1, b=int(b) + 1, value=float(k.max()))
    return f"all p <= {limit}"


def check_completion(cases: int = 10) -> str:
    rng = np.random.default_rng(11)
    primes = arith.sieve_primes(1000).primes
    worst = 0.0
    for _ in range(cases):
        p = int(rng.choice(primes))
        a = int(rng.integers(1, p))
        y = float(rng.integers(2, 400))
        z = float(rng.integers(int(y), 2 * int(y) + 1))
        diff = expsums.completed_sum_decomposition(p, a, y, z).max_abs_diff
        worst = max(worst, diff)
        if diff > 1e-6:
            _fail("expsums", "completion_identity", p=p, a=a, y=y, z=z, diff=diff)
    return f"max diff {worst:.2e}"


def check_boxes(x: float = 1e5, gamma: float = 0.45) -> str:
    ctx, g = analytic.ScaleContext.at(x), analytic.Gamma(gamma)
    sweep = equidist.box_sweep(ctx, g)
    inside, _ = equidist.admissible_pair_count(ctx, g)
    if sum(b.r_count for b in sweep) != inside:
        _fail("equidist", "box_partition", x=x, boxes=sum(b.r_count for b in sweep), pairs=inside)
    h = counting.h_gamma_count(ctx, g, timing=False).h_exact
    pl = equidist.pair_level_count(ctx, g)
    if pl != h:
        _fail("equidist", "pair_level_count_equals_h", x=x, gamma=gamma, pair_level=pl, h=h)
    checked = 0
    for b in sweep:
        if b.r_count == 0:
            continue
        seq = equidist.inverse_fractions(b.box, ctx)
        rep = equidist.discrepancy_report(seq.points, equidist.default_a(b.box))
        if rep.d_star > rep.et_bound:
            _fail("equidist", "erdos_turan", P=b.box.P, Q=b.box.Q, d_star=rep.d_star, bound=rep.et_bound)
        if checked < 10:
            by_classes = equidist.r_gamma_by_progressions(b.box, ctx, g)
            if by_classes != b.r_gamma_count:
                _fail("equidist", "two_route_r_gamma", P=b.box.P, Q=b.box.Q,
                      fractions=b.r_gamma_count, progressions=by_classes)
        checked += 1
    return f"{len(sweep)} boxes at x = {x:g}"


CHECKS: list[tuple[str, str, Callable[[], str]]] = [
    ("arith", "sieve_matches_trial_division", check_sieve),
    ("arith", "inverse_table", check_inverses),
    ("cyclotomic", "migotti_bounds_carlitz", check_carlitz),
    ("cyclotomic", "complement_identity", check_complement),
    ("analytic", "rho_residual", check_rho),
    ("analytic", "gamma_zero", check_gamma_zero),
    ("counting", "desk_counts_and_oracle", check_counts),
    ("expsums", "weil_bound", check_weil),
    ("expsums", "completion_identity", check_completion),
    ("equidist", "box_invariants", check_boxes),
]


def run_all(report: Callable[[CheckResult], None] | None = None) -> list[CheckResult]:
    """Run every check in order; stops at the first VerificationError."""
    out = []
    for module, name, fn in CHECKS:
        res = CheckResult(module, name, fn())
        out.append(res)
        if report is not None:
            report(res)
    return out
