"""Desk-scale acceptance runs; excluded by default, run with `pytest -m slow`."""

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from src.analysis.beta_sieve import build_weights, scan_upper_bound
from src.analysis.digits import fourier_product, string_values
from src.analysis.exp_sums import reconstruct_main_term
from src.analysis.gaussian import verify_split
from src.analysis.local_factors import (
    bruteforce_table,
    local_table,
    mass_identity,
    singular_series,
    singular_series_J,
    stable_depth,
)
from src.analysis.representations import (
    build_ledger,
    collisions,
    lattice_count_ap,
    short_interval_r2,
)
from src.data.primes import prime_count, sieve
from src.models.density import DensityKind, SeriesVariant
from src.models.digitset import DigitSet, StringModel
from src.models.sieve import SieveConfig

pytestmark = pytest.mark.slow


class TestLocalExactness:
    @pytest.mark.parametrize("kind", [DensityKind.RHO, DensityKind.RHO_TILDE, DensityKind.R_UNRESTRICTED])
    def test_all_moduli_to_500(self, kind):
        for q in range(1, 501):
            table = local_table(kind, q)
            assert table.values == bruteforce_table(kind, q).values
            assert table.mass == mass_identity(kind, q)

    def test_digit_average_to_50(self):
        for g in range(3, 51):
            total = sum(singular_series(DigitSet.single(g, b)).value for b in range(g))
            assert total == g

    @pytest.mark.parametrize("g", [6, 10, 12])
    def test_finite_j_stabilises(self, g):
        depth = stable_depth(g)
        for b in range(g):
            ds = DigitSet.single(g, b)
            assert singular_series_J(ds, 1).value == singular_series(ds).value
            if g ** (depth + 1) <= 10**6:
                assert singular_series_J(ds, depth).value == singular_series_J(ds, depth + 1).value


class TestPrimes:
    def test_prime_number_theorem_sanity(self):
        assert prime_count(10**6) == 78498
        assert abs(sieve(2, 10**6).psi() / 10**6 - 1) < 0.01


class TestLedgers:
    @pytest.mark.parametrize("X", [10**6, 10**8, 10**10])
    def test_bracket_and_sandwich(self, X):
        summary = build_ledger(X, DigitSet.single(10, 7), workers=4).summary()
        assert summary.bracket_holds
        assert summary.sandwich_holds

    def test_collisions_split_to_1e8(self):
        ledger = build_ledger(10**8, DigitSet.single(10, 7), workers=4)
        quads = [q for q in collisions(ledger) if not q.degenerate]
        assert quads
        assert all(verify_split(q) for q in quads)

    def test_quadruples_match_pair_enumeration(self):
        ledger = build_ledger(10**5, DigitSet.single(10, 7))
        recount = 0
        for n in ledger.per_n["n"].to_list():
            reps = ledger.representations(n)
            recount += sum(1 for a in reps for b in reps if a.multiset != b.multiset)
        assert ledger.quadruple_count == recount

    def test_digit_bias_at_1e10(self):
        averages = {}
        for b in (0, 1):
            s = build_ledger(10**10, DigitSet.single(10, b), workers=8).summary()
            averages[b] = s.sum_r2 / s.member_count
        assert averages[0] <= 0.8 * averages[1]

    def test_average_converges_by_1e10(self):
        # normalised by the 2-adically exact local series
        def deviation(ds, k):
            s = build_ledger(10**k, ds, workers=8).summary()
            predicted = math.pi / 4 * float(singular_series(ds, SeriesVariant.S_LOCAL).value) * s.member_count
            return abs(s.sum_r2 / predicted - 1)

        passing = 0
        for b in range(10):
            ds = DigitSet.single(10, b)
            at_ten, at_seven = deviation(ds, 10), deviation(ds, 7)
            if at_ten <= 0.15 and at_ten <= at_seven:
                passing += 1
        assert passing >= 8

    def test_off_diagonal_share_at_1e10(self):
        ledger = build_ledger(10**10, DigitSet.single(10, 7), workers=8)
        assert ledger.quadruple_count / ledger.summary().member_count <= 0.01

    def test_nonzero_scale_at_1e10(self):
        s = build_ledger(10**10, DigitSet.single(10, 7), workers=8).summary()
        assert s.sandwich_holds
        assert 0.2 <= s.nonzero * math.log(10**10) ** 2 / s.member_count <= 5


class TestFourier:
    @pytest.mark.parametrize("k", [4, 5, 6])
    def test_product_against_direct_sum(self, k):
        sm = StringModel(DigitSet.single(10, 7), k)
        values = [int(v) for v in string_values(sm)]
        rng = random.Random(k)
        for _ in range(100):
            theta = Fraction(rng.random())
            phases = np.array([float(theta * v % 1) for v in values])
            direct = np.sum(np.exp(2j * np.pi * phases))
            got = fourier_product(theta, sm).value
            assert abs(got - direct) <= 1e-9 * max(1.0, abs(direct))

    def test_plancherel_at_k4(self):
        assert reconstruct_main_term(10**4, DigitSet.single(10, 7)).relative_error < 1e-6


class TestSieveAndLattice:
    @pytest.mark.parametrize("z", [30, 100])
    @pytest.mark.parametrize("s", [3, 5, 38])
    def test_upper_bound_property(self, z, s):
        weights = build_weights(SieveConfig.for_level(z, s, kappa=4))
        violations, _ = scan_upper_bound(weights, 10**6)
        assert violations == 0

    def test_short_interval(self):
        total, main = short_interval_r2(10**8, 10**7)
        assert abs(total / main - 1) <= 0.15

    def test_lattice_constant_is_uniform(self):
        constants = []
        for x in (10**4, 10**5, 10**6):
            for q in (1, 2, 3, 5, 7):
                for u, v in ((1, 1), (1, q), (q, q)):
                    _, _, error = lattice_count_ap(x, q, u, v)
                    constants.append(error / (math.sqrt(x) / q))
        assert max(constants) <= 4
