"""Tests for the upper β-sieve."""

import math
from fractions import Fraction

import pytest

from src.analysis.beta_sieve import (
    build_weights,
    scan_upper_bound,
    sieve_envelope,
    upper_bound_check,
    weighted_density_sum,
)
from src.errors import DensityError, InvalidConfigError
from src.models.sieve import SieveConfig


class TestSieveConfig:
    def test_default_beta(self):
        assert SieveConfig(z=5, D=6, kappa=1).beta == 10

    def test_excluded_modulus(self):
        assert SieveConfig(z=20, D=100, excluded_modulus=10).primes == [3, 7, 11, 13, 17, 19]

    def test_guarantee_needs_level(self):
        with pytest.raises(InvalidConfigError):
            SieveConfig(z=5, D=5**10, kappa=1, guarantee=True)
        assert SieveConfig.for_level(3, 11, kappa=1).guarantee

    def test_invalid(self):
        with pytest.raises(InvalidConfigError):
            SieveConfig(z=1, D=10)
        with pytest.raises(InvalidConfigError):
            SieveConfig(z=5, D=0)


class TestWeights:
    def test_untruncated_is_mobius(self):
        w = build_weights(SieveConfig(z=5, D=6))
        assert w.untruncated
        assert w.entries() == {1: 1, 2: -1, 3: -1, 6: 1}

    def test_truncation(self):
        w = build_weights(SieveConfig(z=5, D=4))
        assert not w.untruncated
        assert w.weight(6) == 0
        assert w.weight(1) == 1

    def test_non_squarefree_and_foreign(self):
        w = build_weights(SieveConfig(z=5, D=6))
        assert w.weight(4) == 0
        assert w.weight(10) == 0

    def test_support_matches_weight(self):
        w = build_weights(SieveConfig(z=14, D=2000, beta=1))
        support = w.entries()
        for d in range(1, math.prod(w.primes) + 1):
            if d <= w.config.D:
                assert support.get(d, 0) == w.weight(d)

    def test_upper_bound_scan(self):
        w = build_weights(SieveConfig.for_level(30, 3, kappa=1))
        violations, checked = scan_upper_bound(w, 10**5)
        assert violations == 0
        assert checked == 10**5

    def test_pointwise_check(self):
        w = build_weights(SieveConfig(z=14, D=2000, beta=1))
        for n in range(1, 2000):
            assert upper_bound_check(n, w)


class TestDensitySums:
    def test_untruncated_is_product(self):
        w = build_weights(SieveConfig(z=5, D=6))
        report = weighted_density_sum(w, "custom", {"g": lambda p: Fraction(1, p)})
        assert report.value == Fraction(1, 3)
        assert report.product_bound == Fraction(1, 3)

    def test_zero_density(self):
        w = build_weights(SieveConfig(z=5, D=6))
        assert weighted_density_sum(w, "custom", {"g": lambda p: 0}).value == 1

    def test_custom_density_must_be_callable(self):
        w = build_weights(SieveConfig(z=5, D=6))
        with pytest.raises(InvalidConfigError):
            weighted_density_sum(w, "custom", {"g": Fraction(1, 2)})

    def test_rho_quad_untruncated(self):
        w = build_weights(SieveConfig(z=5, D=6))
        report = weighted_density_sum(w, "rho_quad", {"a": 1, "b": 2})
        assert report.value == Fraction(1, 4) * Fraction(4, 9)

    def test_truncated_sum_over_support(self):
        w = build_weights(SieveConfig(z=14, D=2000, beta=1))
        density = {p: Fraction(1, p + 1) for p in w.primes}
        expected = Fraction(0)
        for d, lam in w.support():
            term = Fraction(lam)
            for p in w.primes:
                if d % p == 0:
                    term *= density[p]
            expected += term
        report = weighted_density_sum(w, "custom", {"g": lambda p: density[p]})
        assert report.value == expected
        assert report.ratio == pytest.approx(float(expected / report.product_bound))

    def test_degenerate_density(self):
        w = build_weights(SieveConfig(z=5, D=6))
        with pytest.raises(DensityError):
            weighted_density_sum(w, "rho_quad", {"a": 2, "b": 4})

    def test_unknown_kind(self):
        w = build_weights(SieveConfig(z=5, D=6))
        with pytest.raises(InvalidConfigError):
            weighted_density_sum(w, "linear")


class TestEnvelope:
    def test_value(self):
        assert sieve_envelope(1e10, 100) == pytest.approx(
            (math.log(math.log(1e10)) / math.log(100)) ** 4
        )

    def test_invalid(self):
        with pytest.raises(InvalidConfigError):
            sieve_envelope(2, 10)
