"""Sieve configuration and weight models."""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional

from sympy import primerange

from src.errors import InvalidConfigError


@dataclass(frozen=True)
class SieveConfig:
    """Upper β-sieve parameters.

    Primes p < z with gcd(p, excluded_modulus) = 1 form the sifting set.
    Guarantee mode requires D ≥ z^(9κ+2).
    """

    z: int
    D: int
    kappa: float = 4
    beta: Optional[float] = None
    excluded_modulus: int = 1
    guarantee: bool = False

    def __post_init__(self):
        if self.z < 2:
            raise InvalidConfigError(f"z must be >= 2, got {self.z}")
        if self.D < 1:
            raise InvalidConfigError(f"D must be >= 1, got {self.D}")
        if self.beta is None:
            object.__setattr__(self, "beta", 9 * self.kappa + 1)
        if self.guarantee and self.D < self.z ** (9 * self.kappa + 2):
            raise InvalidConfigError(
                f"guarantee mode needs D >= z^(9κ+2); got z={self.z}, D={self.D}, κ={self.kappa}"
            )

    @classmethod
    def for_level(
        cls,
        z: int,
        s: int,
        kappa: float = 4,
        excluded_modulus: int = 1,
    ) -> "SieveConfig":
        """D = z^s, guarantee mode switched on when s ≥ 9κ+2."""
        return cls(
            z=z,
            D=z**s,
            kappa=kappa,
            excluded_modulus=excluded_modulus,
            guarantee=s >= 9 * kappa + 2,
        )

    @property
    def primes(self) -> list[int]:
        """Sifting primes in increasing order."""
        return [p for p in primerange(2, self.z) if math.gcd(p, self.excluded_modulus) == 1]

    @property
    def sifting_product(self) -> int:
        return math.prod(self.primes)

    def to_dict(self) -> dict:
        return {
            "z": self.z,
            "D": self.D,
            "kappa": self.kappa,
            "beta": self.beta,
            "excluded_modulus": self.excluded_modulus,
            "guarantee": self.guarantee,
        }


@dataclass
class SieveWeights:
    """λ_d on squarefree d | P(z).

    In the untruncated regime (P(z) ≤ D) the weights are μ(d) on every
    divisor; otherwise d = p₁⋯p_r (p₁ > ⋯ > p_r) carries μ(d) exactly when
    p₁⋯p_{m−1}·p_m^{β+1} ≤ D for every odd m ≤ r.
    """

    config: SieveConfig
    primes: list[int] = field(default_factory=list)
    untruncated: bool = False

    def weight(self, d: int) -> int:
        """λ_d for any positive integer d."""
        if d == 1:
            return 1
        factors = []
        rest = d
        for p in reversed(self.primes):
            if rest % p == 0:
                rest //= p
                if rest % p == 0:
                    return 0
                factors.append(p)
        if rest != 1:
            return 0
        if not self.untruncated and not self._admissible(factors):
            return 0
        return -1 if len(factors) % 2 else 1

    def _admissible(self, descending: list[int]) -> bool:
        prefix = 1
        for m, p in enumerate(descending, start=1):
            if m % 2 == 1 and prefix * p ** (self.config.beta + 1) > self.config.D:
                return False
            prefix *= p
        return True

    def support(self, limit: Optional[int] = None) -> Iterator[tuple[int, int]]:
        """Yield (d, λ_d) for every d in the support, d ≤ limit when given."""
        cap = self.config.D if limit is None else min(limit, self.config.D)
        beta = self.config.beta
        D = self.config.D
        primes = self.primes
        untruncated = self.untruncated

        # depth-first over descending prime sequences
        def walk(d: int, start: int, depth: int) -> Iterator[tuple[int, int]]:
            yield d, (-1) ** depth
            for i in range(start - 1, -1, -1):
                p = primes[i]
                nd = d * p
                if nd > cap:
                    continue
                m = depth + 1
                if not untruncated and m % 2 == 1 and d * p ** (beta + 1) > D:
                    continue
                yield from walk(nd, i, m)

        yield from walk(1, len(primes), 0)

    def entries(self, limit: Optional[int] = None) -> dict[int, int]:
        return dict(self.support(limit))

    def to_dict(self, limit: Optional[int] = 10_000) -> dict:
        return {
            "config": self.config.to_dict(),
            "untruncated": self.untruncated,
            "entries": {str(d): w for d, w in sorted(self.entries(limit).items())},
        }


@dataclass
class DensitySumReport:
    """Σ λ_d g(d) against ∏_{p ≤ z}(1 − g(p))."""

    value: Fraction
    product_bound: Fraction
    terms: int

    @property
    def ratio(self) -> float:
        if self.product_bound == 0:
            return math.inf
        return float(self.value / self.product_bound)

    def to_dict(self) -> dict:
        return {
            "value": float(self.value),
            "product_bound": float(self.product_bound),
            "ratio": self.ratio,
            "terms": self.terms,
        }
