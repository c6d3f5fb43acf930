"""Prime tables and caching modules."""

from src.data.cache import SummaryCache
from src.data.primes import PrimeTable, base_primes, prime_count, primes_coprime_to, sieve

__all__ = [
    "PrimeTable",
    "SummaryCache",
    "base_primes",
    "prime_count",
    "primes_coprime_to",
    "sieve",
]
