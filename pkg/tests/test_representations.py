"""Tests for the representation ledger."""

import math

import pytest
from sympy import factorint, isprime

from src.analysis.digits import is_member
from src.analysis.gaussian import verify_split
from src.analysis.representations import (
    build_ledger,
    collisions,
    lattice_constant,
    lattice_count_ap,
    nonzero_count,
    off_diagonal_count,
    r_star,
    short_interval_r2,
)
from src.errors import BudgetExceededError, InvalidConfigError
from src.models.digitset import DigitSet
from src.models.experiment import Budgets


def von_mangoldt(n: int) -> float:
    if n < 2:
        return 0.0
    factors = factorint(n)
    if len(factors) != 1:
        return 0.0
    return math.log(next(iter(factors)))


def brute_r2(n: int) -> float:
    return math.fsum(
        von_mangoldt(a) * von_mangoldt(math.isqrt(n - a * a))
        for a in range(1, math.isqrt(n) + 1)
        if math.isqrt(n - a * a) ** 2 == n - a * a
    )


class TestSmallLedger:
    """X = 50 with digit 9 forbidden, checked by hand."""

    @pytest.fixture
    def ledger(self):
        return build_ledger(50, DigitSet.single(10, 9))

    def test_r_star_values(self, ledger):
        assert {n: ledger.r_star_of(n) for n in (8, 13, 18, 34, 50)} == {8: 1, 13: 2, 18: 1, 34: 2, 50: 1}
        assert ledger.r_star_of(29) == 0

    def test_aggregates(self, ledger):
        assert ledger.sum_r_star == 7
        assert ledger.nonzero == 5
        assert ledger.histogram() == {1: 3, 2: 2}
        assert ledger.quadruple_count == 0
        assert ledger.defect_sum == -3
        assert ledger.diagonal_reps == 3

    def test_summary(self, ledger):
        summary = ledger.summary()
        assert summary.member_count == 45
        assert summary.sandwich_holds
        assert summary.above_two == 0

    def test_representations(self, ledger):
        reps = ledger.representations(13)
        assert [(r.p, r.q) for r in reps] == [(2, 3), (3, 2)]


class TestLedgerAgainstBruteForce:
    @pytest.mark.parametrize("X,b", [(2000, 7), (3000, 0), (1500, 1)])
    def test_sum_r2(self, X, b):
        ds = DigitSet.single(10, b)
        ledger = build_ledger(X, ds)
        expected = math.fsum(brute_r2(n) for n in range(1, X + 1) if is_member(n, ds))
        assert ledger.sum_r2 == pytest.approx(expected, rel=1e-12)

    def test_r_star_matches_scan(self):
        ds = DigitSet.single(10, 7)
        ledger = build_ledger(3000, ds)
        for n in range(1, 3001):
            if is_member(n, ds):
                assert ledger.r_star_of(n) == r_star(n)[0]

    def test_tilde_statistics(self):
        X, ds = 800, DigitSet.single(10, 3)
        ledger = build_ledger(X, ds)
        counts = {}
        r1 = 0.0
        for a in range(2, math.isqrt(X) + 1):
            for b in range(1, math.isqrt(X - a * a) + 1):
                n = a * a + b * b
                if is_member(n, ds):
                    r1 += von_mangoldt(a)
                    if isprime(a):
                        counts[n] = counts.get(n, 0) + 1
        assert ledger.r1_mass == pytest.approx(r1, rel=1e-12)
        assert ledger.tilde_sum == sum(counts.values())
        assert ledger.tilde_sum_sq == sum(c * c for c in counts.values())
        assert ledger.tilde_nonzero == len(counts)

    def test_large_pairs(self):
        X, ds = 5000, DigitSet.single(10, 7)
        quarter = math.isqrt(math.isqrt(X))
        expected = sum(
            1
            for p in range(quarter + 1, math.isqrt(X) + 1)
            for q in range(quarter + 1, math.isqrt(X) + 1)
            if isprime(p) and isprime(q) and p * p + q * q <= X and is_member(p * p + q * q, ds)
        )
        assert build_ledger(X, ds).large_pairs == expected

    def test_worker_count_does_not_change_result(self):
        ds = DigitSet.single(10, 7)
        serial = build_ledger(20_000, ds, chunk_size=4).summary()
        parallel = build_ledger(20_000, ds, workers=2, chunk_size=4).summary()
        assert parallel.to_dict() == serial.to_dict()

    def test_progress_callback(self):
        calls = []
        build_ledger(2000, DigitSet.single(10, 7), chunk_size=2, progress_callback=lambda *a: calls.append(a))
        assert calls
        assert calls[-1][0] == calls[-1][1]


class TestLedgerEdges:
    def test_tiny_bound(self):
        ledger = build_ledger(3, DigitSet.single(10, 7))
        assert ledger.nonzero == 0
        assert ledger.sum_r2 == 0.0

    def test_budget(self):
        with pytest.raises(BudgetExceededError):
            build_ledger(10**6, DigitSet.single(10, 7), budgets=Budgets(max_ledger_x=10**5))

    def test_tilde_skipped_above_limit(self):
        ledger = build_ledger(1000, DigitSet.single(10, 7), budgets=Budgets(tilde_max_x=100))
        assert ledger.tilde_sum is None
        assert ledger.r1_mass is None

    def test_invalid(self):
        with pytest.raises(InvalidConfigError):
            build_ledger(0, DigitSet.single(10, 7))
        with pytest.raises(InvalidConfigError):
            build_ledger(100, DigitSet.single(10, 7), workers=0)


class TestCounts:
    def test_r_star_scan(self):
        count, reps = r_star(338)
        assert count == 3
        assert [(r.p, r.q) for r in reps] == [(7, 17), (13, 13), (17, 7)]

    def test_off_diagonal_relation(self):
        ds = DigitSet.single(10, 7)
        ledger = build_ledger(10_000, ds)
        quadruples, defect = off_diagonal_count(10_000, ds, ledger=ledger)
        assert defect - quadruples == -ledger.diagonal_reps

    def test_nonzero_count(self):
        nonzero, above_two, histogram = nonzero_count(50, DigitSet.single(10, 9))
        assert nonzero == 5
        assert above_two == 0
        assert histogram == {1: 3, 2: 2}

    def test_collisions_include_338(self):
        ledger = build_ledger(400, DigitSet.single(10, 7))
        quads = list(collisions(ledger))
        assert any(q.n == 338 for q in quads)
        assert all(verify_split(q) for q in quads if not q.degenerate)


class TestShortIntervals:
    def test_short_interval_matches_brute_force(self):
        total, main = short_interval_r2(1000, 500)
        expected = math.fsum(brute_r2(n) for n in range(1001, 1501))
        assert total == pytest.approx(expected, rel=1e-12)
        assert main == pytest.approx(math.pi / 4 * 500)

    def test_short_interval_from_zero(self):
        total, _ = short_interval_r2(0, 50)
        assert total == pytest.approx(math.fsum(brute_r2(n) for n in range(1, 51)))

    def test_short_interval_invalid(self):
        with pytest.raises(InvalidConfigError):
            short_interval_r2(-1, 10)

    @pytest.mark.parametrize("x,q,u,v", [(100, 1, 1, 1), (1000, 3, 1, 2), (5000, 4, 4, 3), (777, 5, 2, 5)])
    def test_lattice_count(self, x, q, u, v):
        count, main, error = lattice_count_ap(x, q, u, v)
        expected = sum(
            1
            for a in range(1, math.isqrt(x) + 1)
            for b in range(1, math.isqrt(x) + 1)
            if a * a + b * b <= x and (a - u) % q == 0 and (b - v) % q == 0
        )
        assert count == expected
        assert main == pytest.approx(math.pi / 4 * x / q**2)
        assert error == pytest.approx(abs(count - main))
        assert lattice_constant(x, q, error) == pytest.approx(error * q / math.sqrt(x))

    def test_lattice_invalid_residue(self):
        with pytest.raises(InvalidConfigError):
            lattice_count_ap(100, 3, 0, 1)
