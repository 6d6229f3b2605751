import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcp.analytic import ScaleContext
from bcp.arith import mod_inverse, primes_in_range, sieve_primes
from bcp.errors import PreconditionError
from bcp.expsums import (
    bilinear_report,
    bilinear_sum,
    complete_kloosterman,
    completed_sum_decomposition,
    default_windows,
    dfi_average_report,
    irving_average_report,
    kc_bound_report,
    kloosterman_matrix,
    kloosterman_prime_sum,
    max_over_a,
    unit_phase,
)

GOLDEN = float(2 * mpmath.cos(4 * mpmath.pi / 5))  # -1.6180339887...


def e(z):
    return cmath.exp(2j * math.pi * z)


def naive_prime_sum(p, a, y, z):
    qs = [q for q in primes_in_range(math.ceil(y), math.floor(z)).tolist() if q != p]
    return sum(e((a * mod_inverse(q, p) % p) / p) for q in qs), len(qs)


def naive_kloosterman(p, a, b):
    return sum(e((a * x + b * mod_inverse(x, p)) / p) for x in range(1, p))


class TestPhases:
    def test_examples(self):
        assert unit_phase(0, 7) == 1
        assert abs(unit_phase(1, 4) - 1j) < 1e-15
        assert abs(unit_phase(2, 5) + unit_phase(3, 5) - GOLDEN) < 1e-12

    def test_reduction(self):
        assert abs(unit_phase(7 * 10**15 + 3, 7) - unit_phase(3, 7)) < 1e-14
        assert abs(unit_phase(-1, 7) - unit_phase(6, 7)) < 1e-15


class TestIncomplete:
    def test_example(self):
        s = kloosterman_prime_sum(5, 1, 2, 3)
        assert abs(s.value - GOLDEN) < 1e-12 and s.terms == 2

    def test_empty(self):
        s = kloosterman_prime_sum(7, 1, 24, 28)
        assert s.value == 0 and s.terms == 0

    def test_preconditions(self):
        with pytest.raises(PreconditionError):
            kloosterman_prime_sum(7, 14, 10, 20)
        with pytest.raises(PreconditionError):
            kloosterman_prime_sum(7, 1, 20, 10)

    @settings(max_examples=80, deadline=None)
    @given(st.integers(1, 150), st.integers(1, 10**6), st.integers(1, 3000), st.integers(0, 3000))
    def test_against_naive(self, pi, a, y, width):
        p = int(sieve_primes(1000).primes[pi])
        if a % p == 0:
            a += 1
        s = kloosterman_prime_sum(p, a, y, y + width)
        want, n = naive_prime_sum(p, a, y, y + width)
        assert s.terms == n
        assert abs(s.value - want) < 1e-9
        assert abs(s) <= s.terms + 1e-9
        conj = kloosterman_prime_sum(p, -a, y, y + width)
        assert abs(conj.value - s.value.conjugate()) < 1e-9


class TestComplete:
    def test_examples(self):
        assert abs(complete_kloosterman(5, 1, 1).value - (2 + GOLDEN)) < 1e-9
        assert abs(complete_kloosterman(5, 1, 1).value - 0.3819660) < 1e-7
        for p in (7, 11, 101):
            for a in (1, 3, p - 1):
                assert abs(complete_kloosterman(p, a, 0).value + 1) < 1e-9

    @pytest.mark.parametrize("p", [3, 7, 31, 97])
    def test_matrix_matches_naive(self, p):
        k = kloosterman_matrix(p)
        for a in range(p):
            for b in range(0, p, max(1, p // 7)):
                assert abs(k[a, b] - naive_kloosterman(p, a, b)) < 1e-8

    def test_weil_and_reality_exhaustive(self):
        for p in sieve_primes(500).primes.tolist():
            k = kloosterman_matrix(p)[1:, 1:]
            assert np.abs(k.imag).max() < 1e-9
            assert np.abs(k).max() <= 2 * math.sqrt(p) + 1e-9, p


class TestBilinear:
    def test_zero(self):
        ps, qs = primes_in_range(100, 200), primes_in_range(300, 400)
        s = bilinear_sum(np.zeros(len(ps)), np.zeros(len(qs)), 1, ps, qs)
        assert s.value == 0

    def test_reduces_to_incomplete_sum(self):
        qs = primes_in_range(300, 500)
        s = bilinear_sum([1.0], np.ones(len(qs)), 5, [101], qs)
        want = kloosterman_prime_sum(101, 5, 300, 500)
        assert abs(s.value - want.value) < 1e-9 and s.terms == want.terms

    def test_skips_diagonal(self):
        ps = primes_in_range(100, 200)
        s = bilinear_sum(np.ones(len(ps)), np.ones(len(ps)), 1, ps, ps)
        assert s.terms == len(ps) * (len(ps) - 1)

    def test_unit_disc(self):
        with pytest.raises(PreconditionError):
            bilinear_sum([1.5], [1.0], 1, [101], [103])
        with pytest.raises(PreconditionError):
            bilinear_sum([1.0, 1.0], [1.0], 1, [101], [103])

    def test_report_ratio_recorded(self):
        ps = primes_in_range(100, 200)
        _, rep = bilinear_report(np.ones(len(ps)), np.ones(len(ps)), 1, ps, ps, 100, 100)
        assert rep.lemma == "dfi_bilinear"
        assert math.isfinite(rep.ratio) and rep.ratio <= 10


class TestCompletion:
    def test_example(self):
        chk = completed_sum_decomposition(101, 7, 150, 290)
        assert chk.max_abs_diff <= 1e-6

    def test_empty(self):
        chk = completed_sum_decomposition(7, 1, 24, 28)
        assert chk.direct.value == 0 and abs(chk.completed.value) < 1e-12

    def test_window_limit(self):
        with pytest.raises(PreconditionError):
            completed_sum_decomposition(101, 7, 100, 250)

    def test_randomized(self):
        rng = np.random.default_rng(2024)
        primes = sieve_primes(1000).primes
        for _ in range(50):
            p = int(rng.choice(primes))
            a = int(rng.integers(1, p))
            y = int(rng.integers(1, 500))
            z = int(rng.integers(y, 2 * y + 1))
            chk = completed_sum_decomposition(p, a, y, z)
            assert chk.max_abs_diff <= 1e-6 * max(1, chk.direct.terms)


class TestReports:
    def test_max_over_a_matches_loop(self):
        p, y, z = 61, 100, 180
        observed, terms = max_over_a(p, y, z)
        loop = max(abs(kloosterman_prime_sum(p, a, y, z)) for a in range(1, p))
        assert observed == pytest.approx(loop, rel=1e-12)
        assert terms == kloosterman_prime_sum(p, 1, y, z).terms

    def test_kc(self):
        rep = kc_bound_report(1009, 600, 1200)
        assert rep.terms > 0 and math.isfinite(rep.ratio)
        assert rep.reference == pytest.approx(600 ** (15 / 16))
        with pytest.raises(PreconditionError):
            kc_bound_report(101, 1100, 2000)

    def test_irving(self):
        ctx = ScaleContext.at(1e6)
        rep = irving_average_report(100, 50, default_windows(100, 50, ctx))
        assert rep.lemma == "irving" and math.isfinite(rep.ratio)
        with pytest.raises(PreconditionError):
            irving_average_report(100, 10, [])

    def test_irving_empty_window(self):
        ctx = ScaleContext.at(1e6)
        wins = default_windows(100, 50, ctx)
        p0 = wins[0][0]
        with_empty = [(p0, 52.0, 52.0)] + wins[1:]
        without = wins[1:]
        a = irving_average_report(100, 50, with_empty)
        b = irving_average_report(100, 50, without)
        assert a.observed == b.observed and a.terms == b.terms

    def test_irving_workers(self):
        ctx = ScaleContext.at(1e6)
        wins = default_windows(100, 500, ctx)
        assert irving_average_report(100, 500, wins, 1) == irving_average_report(100, 500, wins, 2)

    def test_dfi(self):
        ctx = ScaleContext.at(1e6)
        rep = dfi_average_report(100, 500, default_windows(100, 500, ctx), 7)
        assert rep.lemma == "dfi_average" and rep.terms > 0 and math.isfinite(rep.ratio)
