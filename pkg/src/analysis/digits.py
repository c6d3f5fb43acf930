"""Membership, counting, enumeration and Fourier analysis of missing-digit sets."""

import logging
import math
from fractions import Fraction
from typing import Iterator, Optional, Sequence

import numpy as np

from src.analysis.phases import Real, as_fraction, e, frac
from src.errors import InvalidConfigError, MajorArcDenominatorError, check_budget
from src.models.digitset import (
    DigitSet,
    FourierDecayReport,
    FourierValue,
    HybridSumReport,
    StringModel,
    alpha_from_constant,
)
from src.models.experiment import Budgets

logger = logging.getLogger(__name__)

MAX_STRING_MODEL = 10**8


def to_digits(n: int, g: int) -> list[int]:
    """Base-g digits of n, most significant first ([0] for n = 0)."""
    if n == 0:
        return [0]
    digits = []
    while n:
        n, d = divmod(n, g)
        digits.append(d)
    return digits[::-1]


def from_digits(digits: Sequence[int], g: int) -> int:
    n = 0
    for d in digits:
        n = n * g + d
    return n


def is_member(n: int, ds: DigitSet) -> bool:
    """True iff no base-g digit of n is forbidden (0 has the single digit 0)."""
    if n < 0:
        raise InvalidConfigError(f"membership is defined for n >= 0, got {n}")
    if n == 0:
        return ds.zero_allowed
    while n:
        n, d = divmod(n, ds.g)
        if d in ds.forbidden:
            return False
    return True


def member_mask(values: np.ndarray, ds: DigitSet) -> np.ndarray:
    """Vectorised is_member over a nonnegative int64 array."""
    values = np.asarray(values, dtype=np.int64)
    ok = np.ones(values.shape, dtype=bool)
    if not ds.forbidden:
        return ok
    lookup = np.zeros(ds.g, dtype=bool)
    lookup[list(ds.forbidden)] = True

    rest = values.copy()
    active = rest > 0
    while active.any():
        ok &= ~(active & lookup[rest % ds.g])
        rest //= ds.g
        active = rest > 0
    if not ds.zero_allowed:
        ok &= values != 0
    return ok


def count_leq(X: int, ds: DigitSet) -> int:
    """
    #{1 ≤ n ≤ X : n ∈ A} by digit dynamic programming.

    Args:
        X: Upper bound, at least 1
        ds: Digit set

    Returns:
        Exact count
    """
    if X < 1:
        raise InvalidConfigError(f"count_leq needs X >= 1, got {X}")
    allowed = ds.allowed
    width = len(allowed)
    leading = sum(1 for c in allowed if c > 0)
    digits = to_digits(X, ds.g)
    length = len(digits)

    total = sum(leading * width ** (ell - 1) for ell in range(1, length))
    for i, d in enumerate(digits):
        remaining = length - i - 1
        smaller = sum(1 for c in allowed if c < d and (i > 0 or c > 0))
        total += smaller * width**remaining
        if d in ds.forbidden:
            break
    else:
        total += 1
    return total


def next_member(n: int, ds: DigitSet) -> int:
    """Smallest member of A that is ≥ n."""
    if n <= 0:
        if ds.zero_allowed:
            return 0
        n = 1
    allowed = ds.allowed
    smallest = allowed[0]
    digits = to_digits(n, ds.g)

    first_bad = next((i for i, d in enumerate(digits) if d in ds.forbidden), None)
    if first_bad is None:
        return n

    # bump the first forbidden digit, carrying left through the allowed prefix
    for pos in range(first_bad, -1, -1):
        bigger = [c for c in allowed if c > digits[pos]]
        if bigger:
            tail = [smallest] * (len(digits) - pos - 1)
            return from_digits(digits[:pos] + [bigger[0]] + tail, ds.g)

    lead = next(c for c in allowed if c > 0)
    return from_digits([lead] + [smallest] * len(digits), ds.g)


def iter_members(lo: int, hi: int, ds: DigitSet) -> Iterator[int]:
    """Members of A ∩ [lo, hi] in increasing order, jumping over forbidden blocks."""
    if not 1 <= lo <= hi:
        raise InvalidConfigError(f"iter_members needs 1 <= lo <= hi, got [{lo}, {hi}]")
    n = next_member(lo, ds)
    while n <= hi:
        yield n
        n = next_member(n + 1, ds)


def string_values(sm: StringModel) -> np.ndarray:
    """Integer values of all (g−t)^k digit strings, ascending."""
    check_budget("string model size", sm.cardinality, MAX_STRING_MODEL)
    allowed = np.array(sm.ds.allowed, dtype=np.int64)
    values = np.zeros(1, dtype=np.int64)
    for _ in range(sm.k):
        values = (values[:, None] * sm.ds.g + allowed[None, :]).ravel()
    return values


def iter_strings(sm: StringModel) -> Iterator[int]:
    """Stream the string model (leading zeros allowed) in increasing order."""
    yield from (int(v) for v in string_values(sm))


def _position_factors(sm: StringModel, theta: Fraction) -> list[complex]:
    """Σ_{c allowed} e(θ·c·g^j) for j = 0..k−1."""
    return [
        sum(e(theta * c * sm.ds.g**j) for c in sm.ds.allowed)
        for j in range(sm.k)
    ]


def _short_lengths(factors: Sequence[complex]) -> complex:
    """Σ_{ℓ<k} ∏_{j<ℓ} f_j: members with fewer than k digits when 0 is forbidden."""
    total, running = 0j, 1 + 0j
    for f in factors[:-1]:
        running *= f
        total += running
    return total


def restricted_correction(sm: StringModel, theta: Real) -> complex:
    """Term turning the string-model transform into Σ_{n∈A∩[1,X]} e(θn).

    With 0 allowed the all-zero string is dropped; with 0 forbidden the
    strings only cover k-digit members, so every shorter length is added.
    """
    th = as_fraction(theta)
    if sm.ds.zero_allowed:
        correction = -1.0 + 0j
    else:
        correction = _short_lengths(_position_factors(sm, th))
    if is_member(sm.X, sm.ds):
        correction += e(th * sm.X)
    return correction


def fourier_product(theta: Real, sm: StringModel) -> FourierValue:
    """
    ∏_{j<k} Σ_{c allowed} e(θ·c·g^j), every phase reduced exactly.

    Args:
        theta: Frequency in [0, 1); floats are taken at their exact binary value
        sm: String model

    Returns:
        FourierValue with the correction term for A(X) = A ∩ [1, X]
    """
    th = as_fraction(theta)
    if not 0 <= th < 1:
        raise InvalidConfigError(f"theta must lie in [0, 1), got {theta}")
    factors = _position_factors(sm, th)
    value = 1 + 0j
    for f in factors:
        value *= f
    return FourierValue(
        theta=float(th),
        value=value,
        k=sm.k,
        correction=restricted_correction(sm, th),
    )


def _grid_factors(
    sm: StringModel,
    offset: Real,
    a: np.ndarray,
    budgets: Optional[Budgets] = None,
) -> Iterator[np.ndarray]:
    """Per-position factors at θ = offset + a/X, phases reduced exactly."""
    budgets = budgets or Budgets()
    X = sm.X
    check_budget("transform X", X, budgets.max_transform_x)
    a = np.asarray(a, dtype=np.int64) % X
    off = as_fraction(offset)
    for j in range(sm.k):
        gj = sm.ds.g**j
        base = float(frac(off * gj))
        phase = np.mod(base + ((a * gj) % X).astype(np.float64) / X, 1.0)
        factor = np.zeros(a.shape, dtype=np.complex128)
        for c in sm.ds.allowed:
            factor += np.exp(2j * np.pi * np.mod(c * phase, 1.0))
        yield factor


def transform_grid(
    sm: StringModel,
    offset: Real,
    a: np.ndarray,
    budgets: Optional[Budgets] = None,
) -> np.ndarray:
    """
    String-model transform at θ = offset + a/X for an integer array a.

    Phases are reduced exactly: offset·g^j through rationals, a·g^j mod X in
    int64, which needs X² < 2^63.
    """
    result = np.ones(np.shape(a), dtype=np.complex128)
    for factor in _grid_factors(sm, offset, a, budgets):
        result *= factor
    return result


def restricted_grid(
    sm: StringModel,
    offset: Real,
    a: np.ndarray,
    budgets: Optional[Budgets] = None,
) -> np.ndarray:
    """Σ_{n∈A∩[1,X]} e(θn) at θ = offset + a/X."""
    result = np.ones(np.shape(a), dtype=np.complex128)
    if sm.ds.zero_allowed:
        for factor in _grid_factors(sm, offset, a, budgets):
            result *= factor
        result -= 1.0
    else:
        total = np.zeros(np.shape(a), dtype=np.complex128)
        for factor in _grid_factors(sm, offset, a, budgets):
            result *= factor
            total += result
        result = total
    if is_member(sm.X, sm.ds):
        result += e(as_fraction(offset) * sm.X)
    return result


def _grid_mass(sm: StringModel, theta: Fraction, budgets: Budgets) -> float:
    """M(θ) = Σ_{0≤a<X} |1̂(θ + a/X)|."""
    values = transform_grid(sm, theta, np.arange(sm.X, dtype=np.int64), budgets)
    return math.fsum(np.abs(values).tolist())


def _coprime_part(s: int, g: int) -> int:
    """s with every prime dividing g removed."""
    d = math.gcd(s, g)
    while d > 1:
        s //= d
        d = math.gcd(s, g)
    return s


def decay_at_rational(r: int, s: int, sm: StringModel) -> tuple[float, float]:
    """
    |1̂_A(r/s)| / #A(X) and the fitted exponent −log(ratio)·log s / log X.

    Raises:
        MajorArcDenominatorError: every prime factor of s divides g
    """
    if math.gcd(r, s) != 1 or not 1 <= r < s:
        raise InvalidConfigError(f"need gcd(r, s) = 1 and 1 <= r < s, got r={r}, s={s}")
    if s**3 >= sm.X:
        raise InvalidConfigError(f"denominator {s} must satisfy s < X^(1/3) for X={sm.X}")
    if _coprime_part(s, sm.ds.g) == 1:
        raise MajorArcDenominatorError(
            f"major-arc-type denominator: every prime factor of {s} divides g={sm.ds.g}"
        )

    fv = fourier_product(Fraction(r, s), sm)
    ratio = abs(fv.restricted_value) / count_leq(sm.X, sm.ds)
    if ratio == 0:
        return 0.0, math.inf
    exponent = -math.log(ratio) * math.log(s) / math.log(sm.X)
    return ratio, exponent


def measure_l1_constant(
    sm: StringModel,
    theta_samples: int = 16,
    refine_points: int = 8,
    decay_denominators: Sequence[int] = (),
    budgets: Optional[Budgets] = None,
) -> FourierDecayReport:
    """
    Lower estimate of C_g from sup_θ Σ_a |1̂_A(θ + a/X)| ≈ (C_g g log g)^k.

    θ runs over an equispaced grid on [0, 1/X) (M is 1/X-periodic) which is
    refined once around the best sample.
    """
    if sm.k < 2:
        raise InvalidConfigError(f"measure_l1_constant needs k >= 2, got {sm.k}")
    if theta_samples < 1:
        raise InvalidConfigError(f"theta_samples must be >= 1, got {theta_samples}")
    budgets = budgets or Budgets()
    X = sm.X
    step = Fraction(1, theta_samples * X)

    samples: dict[Fraction, float] = {}
    for i in range(theta_samples):
        theta = i * step
        samples[theta] = _grid_mass(sm, theta, budgets)

    best = max(samples, key=lambda th: samples[th])
    for j in range(-refine_points, refine_points + 1):
        theta = (best + j * step / (refine_points + 1)) % Fraction(1, X)
        if theta not in samples:
            samples[theta] = _grid_mass(sm, theta, budgets)

    peak = max(samples.values())
    g = sm.ds.g
    C_g = math.exp((math.log(peak) - sm.k * math.log(g * math.log(g))) / sm.k)
    alpha = alpha_from_constant(C_g, g, sm.ds.t)

    c_g = None
    exponents = []
    for s in decay_denominators:
        if s**3 < X and _coprime_part(s, g) > 1:
            exponents.append(decay_at_rational(1, s, sm)[1])
    if exponents:
        c_g = min(exponents)

    logger.info(f"{sm.ds} k={sm.k}: C_g≈{C_g:.6f}, α_g≈{alpha:.6f}, {len(samples)} θ samples")
    return FourierDecayReport(
        ds=sm.ds,
        k=sm.k,
        C_g_estimate=C_g,
        alpha_g=alpha,
        c_g_estimate=c_g,
        samples=sorted((float(th), m) for th, m in samples.items()),
    )


def measure_hybrid_sum(
    sm: StringModel,
    S: int,
    D: int,
    C_g: float,
    budgets: Optional[Budgets] = None,
) -> HybridSumReport:
    """
    Σ_{S≤s<2S} Σ_{(r,s)=1} Σ_{|η|<D, Xr/s+η∈ℤ} |1̂_A(r/s + η/X)| against
    #A(X)(S²D)^{α_g} + S²D(C_g log g)^k.
    """
    if S < 1 or D < 1:
        raise InvalidConfigError(f"hybrid sum needs S, D >= 1, got S={S}, D={D}")
    X = sm.X
    points = []
    for s in range(S, 2 * S):
        for r in range(s):
            if math.gcd(r, s) != 1:
                continue
            center = Fraction(X * r, s)
            lo = math.floor(center - D) + 1
            hi = math.ceil(center + D) - 1
            points.extend(range(lo, hi + 1))

    a = np.array(points, dtype=np.int64)
    values = restricted_grid(sm, 0, a, budgets)
    measured = math.fsum(np.abs(values).tolist())

    g = sm.ds.g
    alpha = alpha_from_constant(C_g, g, sm.ds.t)
    scale = S * S * D
    bound = count_leq(X, sm.ds) * scale**alpha + scale * (C_g * math.log(g)) ** sm.k
    return HybridSumReport(S=S, D=D, measured=measured, bound=bound, points=len(points))
