"""Segmented prime sieve and von Mangoldt tables."""

import logging
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from src.errors import InvalidConfigError, check_budget
from src.models.experiment import Budgets

logger = logging.getLogger(__name__)


def base_primes(limit: int) -> np.ndarray:
    """All primes ≤ limit by a plain sieve of Eratosthenes."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


@dataclass
class PrimeTable:
    """Primes and prime powers in [lo, hi] with Λ(n) = log p on prime powers."""

    lo: int
    hi: int
    primes: np.ndarray
    prime_powers: np.ndarray = field(default_factory=lambda: np.array([], dtype=np.int64))
    log_values: np.ndarray = field(default_factory=lambda: np.array([], dtype=np.float64))

    @property
    def count(self) -> int:
        return int(self.primes.size)

    def von_mangoldt(self, n: int) -> float:
        """Λ(n) for n in the window; 0 off prime powers."""
        idx = int(np.searchsorted(self.prime_powers, n))
        if idx < self.prime_powers.size and int(self.prime_powers[idx]) == n:
            return float(self.log_values[idx])
        return 0.0

    def psi(self) -> float:
        """Σ Λ(n) over the window."""
        return math.fsum(self.log_values.tolist())

    def is_prime_power_prime(self) -> np.ndarray:
        """Mask over prime_powers marking the entries that are primes."""
        return np.isin(self.prime_powers, self.primes, assume_unique=True)

    def to_dict(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "prime_count": self.count,
            "prime_power_count": int(self.prime_powers.size),
        }


def _sieve_segment(lo: int, hi: int, small: np.ndarray) -> np.ndarray:
    """Primes in [lo, hi] using base primes `small` (all primes ≤ √hi)."""
    flags = np.ones(hi - lo + 1, dtype=bool)
    for p in small.tolist():
        if p * p > hi:
            break
        start = max(p * p, ((lo + p - 1) // p) * p)
        if start > hi:
            continue
        flags[start - lo :: p] = False
    if lo <= 1:
        flags[: 2 - lo] = False
    return (np.flatnonzero(flags) + lo).astype(np.int64)


def sieve(
    lo: int,
    hi: int,
    segment_size: Optional[int] = None,
    budgets: Optional[Budgets] = None,
) -> PrimeTable:
    """
    Segmented sieve of Eratosthenes over [lo, hi].

    Args:
        lo: Window start, at least 2
        hi: Window end (inclusive)
        segment_size: Integers sieved per segment (budgets.segment_size when omitted)
        budgets: Desk budgets; the window and bound are checked before any work

    Returns:
        PrimeTable with primes, prime powers and their Λ values
    """
    budgets = budgets or Budgets()
    if lo < 2 or hi < lo:
        raise InvalidConfigError(f"sieve needs 2 <= lo <= hi, got [{lo}, {hi}]")
    check_budget("sieve bound", hi, budgets.max_prime_bound)
    check_budget("sieve window", hi - lo + 1, budgets.max_sieve_window)
    segment_size = segment_size or budgets.segment_size

    small = base_primes(math.isqrt(hi))
    chunks = []
    for start in range(lo, hi + 1, segment_size):
        stop = min(start + segment_size - 1, hi)
        chunks.append(_sieve_segment(start, stop, small))
    primes = np.concatenate(chunks) if chunks else np.array([], dtype=np.int64)

    # higher powers only come from primes ≤ √hi
    powers = [primes]
    logs = [np.log(primes.astype(np.float64))]
    for p in small.tolist():
        pk = p * p
        extra = []
        while pk <= hi:
            if pk >= lo:
                extra.append(pk)
            pk *= p
        if extra:
            powers.append(np.array(extra, dtype=np.int64))
            logs.append(np.full(len(extra), math.log(p)))
    prime_powers = np.concatenate(powers)
    log_values = np.concatenate(logs)
    order = np.argsort(prime_powers, kind="stable")

    logger.debug(f"Sieved [{lo}, {hi}]: {primes.size} primes, {prime_powers.size} prime powers")
    return PrimeTable(
        lo=lo,
        hi=hi,
        primes=primes,
        prime_powers=prime_powers[order],
        log_values=log_values[order],
    )


def primes_coprime_to(
    m: int,
    lo: int,
    hi: int,
    segment_size: Optional[int] = None,
    budgets: Optional[Budgets] = None,
) -> Iterator[int]:
    """Yield primes p in [lo, hi] with gcd(p, m) = 1."""
    if m < 1:
        raise InvalidConfigError(f"modulus must be >= 1, got {m}")
    lo = max(lo, 2)
    if hi < lo:
        return
    table = sieve(lo, hi, segment_size=segment_size, budgets=budgets)
    for p in table.primes.tolist():
        if math.gcd(p, m) == 1:
            yield p


def prime_count(
    upto: int,
    segment_size: Optional[int] = None,
    budgets: Optional[Budgets] = None,
) -> int:
    """π(upto), summed segment by segment."""
    budgets = budgets or Budgets()
    check_budget("prime bound", upto, budgets.max_prime_bound)
    segment_size = segment_size or budgets.segment_size
    if upto < 2:
        return 0
    small = base_primes(math.isqrt(upto))
    total = 0
    for start in range(2, upto + 1, segment_size):
        stop = min(start + segment_size - 1, upto)
        total += int(_sieve_segment(start, stop, small).size)
    return total
