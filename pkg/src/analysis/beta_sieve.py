"""Upper β-sieve weights and their density sums."""

import itertools
import logging
import math
from fractions import Fraction
from typing import Optional

import numpy as np

from src.analysis.local_factors import rho_quad
from src.contracts import SieveDensityProtocol
from src.errors import DensityError, InvalidConfigError, check_budget
from src.models.sieve import DensitySumReport, SieveConfig, SieveWeights

logger = logging.getLogger(__name__)

MAX_SUPPORT_TERMS = 5_000_000


def build_weights(cfg: SieveConfig) -> SieveWeights:
    """Weights for cfg; untruncated Möbius when P(z) ≤ D."""
    primes = cfg.primes
    untruncated = math.prod(primes) <= cfg.D
    logger.debug(
        f"Sieve weights z={cfg.z} D={cfg.D} β={cfg.beta}: {len(primes)} primes, "
        f"{'untruncated' if untruncated else 'truncated'}"
    )
    return SieveWeights(config=cfg, primes=primes, untruncated=untruncated)


def _sifting_factors(n: int, w: SieveWeights) -> list[int]:
    return [p for p in w.primes if n % p == 0]


def upper_bound_check(n: int, w: SieveWeights) -> bool:
    """1_{(n, P(z)) = 1} ≤ Σ_{d | n} λ_d."""
    if n < 1:
        raise InvalidConfigError(f"n must be >= 1, got {n}")
    factors = _sifting_factors(n, w)
    total = 0
    for size in range(len(factors) + 1):
        for combo in itertools.combinations(factors, size):
            total += w.weight(math.prod(combo))
    return total >= (1 if not factors else 0)


def scan_upper_bound(w: SieveWeights, N: int) -> tuple[int, int]:
    """
    Check the upper-bound property at every n ≤ N.

    Returns:
        (violations, checked)
    """
    if N < 1:
        raise InvalidConfigError(f"N must be >= 1, got {N}")
    totals = np.zeros(N + 1, dtype=np.int64)
    for d, lam in w.support(limit=N):
        totals[d::d] += lam

    coprime = np.ones(N + 1, dtype=np.int64)
    for p in w.primes:
        coprime[p::p] = 0
    violations = int(np.count_nonzero(totals[1:] < coprime[1:]))
    if violations:
        logger.warning(f"Upper-bound property fails at {violations} of {N} integers")
    return violations, N


def _density_function(kind: str, params: dict) -> SieveDensityProtocol:
    if kind == "rho_quad":
        a, b = int(params.get("a", 1)), int(params.get("b", 2))
        return lambda p: Fraction(rho_quad(p, a, b), p * p)
    if kind == "custom":
        g = params.get("g")
        if not isinstance(g, SieveDensityProtocol):
            raise InvalidConfigError("custom density needs a callable 'g'")
        return lambda p: Fraction(g(p))
    raise InvalidConfigError(f"unknown density kind {kind!r} (use rho_quad or custom)")


def weighted_density_sum(
    w: SieveWeights,
    kind: str = "rho_quad",
    params: Optional[dict] = None,
) -> DensitySumReport:
    """
    Σ_{d | P(z)} λ_d g(d) for multiplicative g, against ∏_{p < z}(1 − g(p)).

    Args:
        w: Sieve weights
        kind: "rho_quad" (g(h) = ρ(h;a,b)/h², params a and b) or "custom"
            (params["g"] maps a prime to its density)
        params: Density parameters

    Returns:
        DensitySumReport with exact Fractions

    Raises:
        DensityError: g(p) ≥ 1 or g(p) < 0 at some sifting prime
    """
    g = _density_function(kind, params or {})
    local = {}
    for p in w.primes:
        value = g(p)
        if not 0 <= value < 1:
            raise DensityError(f"density g({p})={value} outside [0, 1)")
        local[p] = value

    product = Fraction(1)
    for p in w.primes:
        product *= 1 - local[p]

    if w.untruncated:
        # Σ μ(d) g(d) over d | P(z) is the full Euler product
        return DensitySumReport(value=product, product_bound=product, terms=2 ** len(w.primes))

    value = Fraction(0)
    terms = 0
    for d, lam in w.support():
        terms += 1
        check_budget("sieve support terms", terms, MAX_SUPPORT_TERMS)
        gd = Fraction(1)
        for p in _sifting_factors(d, w):
            gd *= local[p]
        value += lam * gd
    return DensitySumReport(value=value, product_bound=product, terms=terms)


def sieve_envelope(X: float, H: float) -> float:
    """(log log X)⁴ / (log H)⁴."""
    if X <= math.e or H <= 1:
        raise InvalidConfigError(f"envelope needs X > e and H > 1, got X={X}, H={H}")
    return (math.log(math.log(X)) / math.log(H)) ** 4
