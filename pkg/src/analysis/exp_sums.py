"""Exponential sums, rational approximation and the major/minor arc split."""

import logging
import math
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np
from sympy import divisor_count

from src.analysis.digits import restricted_grid
from src.analysis.phases import Real, as_fraction, frac, fractional_phases, unit_vectors
from src.analysis.representations import build_ledger
from src.data.primes import sieve
from src.errors import DensityError, InvalidConfigError, check_budget
from src.models.arcs import (
    ArcClass,
    ArcPartition,
    ExpSumValue,
    MainTermReport,
    MajorArc,
    MinorArc,
    RationalApprox,
)
from src.models.digitset import DigitSet, StringModel
from src.models.experiment import Budgets
from src.models.ledger import RepresentationLedger

logger = logging.getLogger(__name__)

Weights = Union[Sequence[int], Callable[[int], int]]


def _dyadic(value: Union[int, float, Fraction]) -> int:
    """Smallest power of two ≥ max(1, value)."""
    ceiling = max(1, math.ceil(value))
    return 1 << (ceiling - 1).bit_length()


def _round_div(x: int, n: int) -> int:
    return (2 * x + n) // (2 * n)


def convergents(alpha: Fraction) -> list[tuple[int, int]]:
    """All continued-fraction convergents (r, s) of a rational alpha."""
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    out = []
    x = alpha
    while True:
        a = math.floor(x)
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        out.append((h, k))
        rest = x - a
        if rest == 0:
            return out
        x = 1 / rest


def dirichlet_approx(alpha: Real, Q: int) -> RationalApprox:
    """
    alpha = r/s + xi with s ≤ Q and |xi| ≤ 1/(sQ), from the convergents.

    Args:
        alpha: Real in [0, 1); floats are taken at their exact binary value
        Q: Denominator bound, at least 2

    Returns:
        RationalApprox at the valid convergent of smallest denominator
    """
    a = as_fraction(alpha)
    if not 0 <= a < 1:
        raise InvalidConfigError(f"alpha must lie in [0, 1), got {alpha}")
    if Q < 2:
        raise InvalidConfigError(f"Q must be >= 2, got {Q}")

    for r, s in convergents(a):
        if s > Q:
            break
        xi = a - Fraction(r, s)
        if abs(xi) * s * Q <= 1:
            return RationalApprox(alpha=a, r=r, s=s, xi=xi, Q=Q)
    # the last convergent with s ≤ Q always qualifies
    raise ArithmeticError(f"no convergent of {a} satisfies the Dirichlet bound for Q={Q}")


def classify_arc(a: int, X: int, partition: ArcPartition) -> ArcClass:
    """
    Major(r, s, eta) when a/X lies within partition.width/X of some r/s with
    s ≤ partition.denominator_bound (smallest s first); Minor otherwise.
    """
    if not 0 <= a < X:
        raise InvalidConfigError(f"a must lie in [0, X), got a={a}, X={X}")
    width = partition.width
    for s in range(1, partition.denominator_bound + 1):
        r = _round_div(a * s, X)
        if math.gcd(r, s) != 1:
            continue
        eta = Fraction(a * s - X * r, s)
        if abs(eta) <= width:
            return MajorArc(r=r, s=s, eta=eta)

    approx = dirichlet_approx(Fraction(a, X), partition.dirichlet_q)
    eta_abs = abs(approx.xi) * X
    return MinorArc(r=approx.r, s=approx.s, xi=approx.xi, S=_dyadic(approx.s), D=_dyadic(eta_abs))


def arcs_containing(a: int, X: int, partition: ArcPartition) -> list[MajorArc]:
    """Every major arc whose interval holds a/X."""
    width = partition.width
    found = []
    for s in range(1, partition.denominator_bound + 1):
        near = (a * s) // X
        for r in range(max(0, near - 1), min(s, near + 2) + 1):
            if math.gcd(r, s) != 1:
                continue
            eta = Fraction(a * s - X * r, s)
            if abs(eta) <= width:
                found.append(MajorArc(r=r, s=s, eta=eta))
    return found


def _reduced(theta: Real) -> Fraction:
    return frac(as_fraction(theta))


def prime_square_sum(alpha: Real, x: int, budgets: Optional[Budgets] = None) -> ExpSumValue:
    """
    Σ_{n≤x} Λ(n) e(αn²), evaluated directly.

    The envelope is (N^{2/5} + (s|ξ|)^{−1/2}) log N with N = x² and r/s the
    Dirichlet approximation of α at Q = N^{3/4}.
    """
    if x < 2:
        raise InvalidConfigError(f"x must be >= 2, got {x}")
    table = sieve(2, x, budgets=budgets)
    n = table.prime_powers
    phases = fractional_phases(alpha, n * n)
    value = complex(np.sum(table.log_values * unit_vectors(phases)))
    trivial = table.psi()

    N = x * x
    approx = dirichlet_approx(_reduced(alpha), max(2, math.floor(N**0.75)))
    envelope = None
    if approx.xi != 0:
        envelope = (N**0.4 + (approx.s * abs(float(approx.xi))) ** -0.5) * math.log(N)
    return ExpSumValue(
        alpha=float(as_fraction(alpha)),
        value=value,
        terms=int(n.size),
        trivial_bound=trivial,
        envelope=envelope,
        extra={"r": approx.r, "s": approx.s, "xi": float(approx.xi)},
    )


def r2_exp_sum(theta: Real, N: int, budgets: Optional[Budgets] = None) -> ExpSumValue:
    """
    Σ_{n≤N} r₂(n) e(θn) opened as Σ_a Λ(a)e(θa²) Σ_{b ≤ √(N−a²)} Λ(b)e(θb²).

    Inner sums are prefix sums over the prime powers, so the cost is
    O(π(√N)) after the sieve.
    """
    if N < 1:
        raise InvalidConfigError(f"N must be >= 1, got {N}")
    budgets = budgets or Budgets()
    check_budget("exponential sum N", N, budgets.max_transform_x)
    root = math.isqrt(N)
    if root < 2:
        return ExpSumValue(alpha=float(_reduced(theta)), value=0j, terms=0, trivial_bound=0.0)

    table = sieve(2, root, budgets=budgets)
    pp, logs = table.prime_powers, table.log_values
    weighted = logs * unit_vectors(fractional_phases(theta, pp * pp))
    prefix = np.cumsum(weighted)
    log_prefix = np.cumsum(logs)

    limits = np.array([math.isqrt(N - a * a) for a in pp.tolist()], dtype=np.int64)
    counts = np.searchsorted(pp, limits, side="right")
    live = counts > 0
    idx = counts[live] - 1
    value = complex(np.sum(weighted[live] * prefix[idx]))
    trivial = float(np.sum(logs[live] * log_prefix[idx]))

    approx = dirichlet_approx(_reduced(theta), max(2, math.floor(N**0.75)))
    envelope = None
    if approx.xi != 0 and N > 1:
        envelope = (
            N**0.9 + math.sqrt(N) * (approx.s * abs(float(approx.xi))) ** -0.5
        ) * math.log(N)
    return ExpSumValue(
        alpha=float(_reduced(theta)),
        value=value,
        terms=int(counts.sum()),
        trivial_bound=trivial,
        envelope=envelope,
        extra={"r": approx.r, "s": approx.s, "xi": float(approx.xi)},
    )


def r2_dense(N: int, budgets: Optional[Budgets] = None) -> np.ndarray:
    """r₂(n) for 0 ≤ n ≤ N as a float64 array."""
    budgets = budgets or Budgets()
    check_budget("dense r2 length", N, budgets.max_transform_x)
    out = np.zeros(N + 1, dtype=np.float64)
    root = math.isqrt(N)
    if root < 2:
        return out
    table = sieve(2, root, budgets=budgets)
    pp, logs = table.prime_powers, table.log_values
    for a, log_a in zip(pp.tolist(), logs.tolist()):
        stop = int(np.searchsorted(pp, math.isqrt(N - a * a), side="right"))
        if stop == 0:
            break
        np.add.at(out, a * a + pp[:stop] * pp[:stop], log_a * logs[:stop])
    return out


def _weight_array(weights: Weights, N: int) -> np.ndarray:
    if callable(weights):
        values = [weights(n) for n in range(1, N + 1)]
    else:
        values = list(weights)
        if len(values) != N:
            raise InvalidConfigError(f"expected {N} weights, got {len(values)}")
    for n, w in enumerate(values, start=1):
        if abs(w) > int(divisor_count(n)):
            raise DensityError(f"weight a_{n}={w} exceeds the divisor bound tau({n})")
    return np.array(values, dtype=np.float64)


def _progression(M: int, h: int, u: int) -> np.ndarray:
    """1 ≤ m ≤ M with m ≡ u mod h."""
    start = u % h or h
    return np.arange(start, M + 1, h, dtype=np.int64)


def double_quadratic_sum(
    alpha: Real,
    N: int,
    M1: int,
    M2: int,
    h: int = 1,
    u: int = 1,
    v: int = 1,
    weights: Optional[Weights] = None,
    budgets: Optional[Budgets] = None,
) -> ExpSumValue:
    """
    Σ_{n≤N} a_n Σ_{m₁≤M₁, m₂≤M₂, (m₁,m₂) ≡ (u,v) mod h} e(αn(m₁² + m₂²)).

    The inner double sum factors into two progressions evaluated directly.

    Args:
        alpha: Frequency
        N: Outer length
        M1: First inner length
        M2: Second inner length
        h: Modulus of the congruence on (m₁, m₂)
        u: Residue of m₁
        v: Residue of m₂
        weights: a_1..a_N or a callable n → a_n; all ones by default
        budgets: Desk budgets

    Returns:
        ExpSumValue with the bilinear bound shape as envelope

    Raises:
        DensityError: Some |a_n| > τ(n)
    """
    if min(N, M1, M2, h) < 1:
        raise InvalidConfigError("N, M1, M2 and h must all be >= 1")
    budgets = budgets or Budgets()
    x = (M1 * M1 + M2 * M2) * N
    check_budget("quadratic sum size (M1²+M2²)N", x, budgets.max_quadratic_terms)

    a = _weight_array(weights if weights is not None else [1] * N, N)
    m1 = _progression(M1, h, u)
    m2 = _progression(M2, h, v)
    sq1, sq2 = m1 * m1, m2 * m2

    terms = []
    for n in range(1, N + 1):
        if a[n - 1] == 0:
            continue
        first = np.sum(unit_vectors(fractional_phases(alpha, n * sq1)))
        second = np.sum(unit_vectors(fractional_phases(alpha, n * sq2)))
        terms.append(a[n - 1] * first * second)
    value = complex(np.sum(terms)) if terms else 0j
    trivial = float(np.abs(a).sum()) * m1.size * m2.size

    envelope = None
    extra: dict = {}
    if x >= 3:
        approx = dirichlet_approx(_reduced(alpha), max(2, math.isqrt(x)))
        delta = math.log(max(M1, M2)) / math.log(x)
        extra = {"r": approx.r, "s": approx.s, "xi": float(approx.xi), "delta": delta}
        if approx.xi != 0:
            s_xi = approx.s * abs(float(approx.xi))
            envelope = (
                math.sqrt(h)
                * (x ** (1 - delta / 4) + x * s_xi**0.25 + x**0.75 / s_xi**0.25)
                * math.log(x) ** 3
            )
    return ExpSumValue(
        alpha=float(as_fraction(alpha)),
        value=value,
        terms=int(N * m1.size * m2.size),
        trivial_bound=trivial,
        envelope=envelope,
        extra=extra,
    )


def _major_arc_owner(X: int, partition: ArcPartition) -> tuple[np.ndarray, list[tuple[int, int]]]:
    """Owner index per a (−1 on minor arcs) and the (r, s) list, smallest s first."""
    owner = np.full(X, -1, dtype=np.int64)
    centers: list[tuple[int, int]] = []
    width = partition.width
    for s in range(1, partition.denominator_bound + 1):
        for r in range(s):
            if math.gcd(r, s) != 1:
                continue
            lo = math.ceil(Fraction(X * r, s) - Fraction(width))
            hi = math.floor(Fraction(X * r, s) + Fraction(width))
            points = np.arange(lo, hi + 1, dtype=np.int64) % X
            free = points[owner[points] == -1]
            if free.size == 0:
                continue
            owner[free] = len(centers)
            centers.append((r, s))
    return owner, centers


def reconstruct_main_term(
    X: int,
    ds: DigitSet,
    partition: Optional[ArcPartition] = None,
    ledger: Optional[RepresentationLedger] = None,
    with_buckets: bool = False,
    budgets: Optional[Budgets] = None,
) -> MainTermReport:
    """
    Σ_{n∈A(X)} r₂(n) = (1/X) Σ_{0≤a<X} 1̂_A(a/X) S(−a/X), split by arcs.

    Args:
        X: Must equal g^k with k within the Plancherel budget
        ds: Digit set
        partition: Arc parameters; (log X)² arcs by default
        ledger: Ledger whose Σr₂ is the exact left-hand side; built when omitted
        with_buckets: Also aggregate minor arcs by dyadic (S, D)
        budgets: Desk budgets

    Returns:
        MainTermReport with per-arc contributions
    """
    budgets = budgets or Budgets()
    k = round(math.log(X, ds.g))
    if ds.g**k != X:
        raise InvalidConfigError(f"X={X} is not a power of g={ds.g}")
    check_budget("Plancherel k", k, budgets.max_plancherel_k)
    partition = partition or ArcPartition(X)
    if partition.X != X:
        raise InvalidConfigError(f"partition built for X={partition.X}, not {X}")

    sm = StringModel(ds, k)
    a = np.arange(X, dtype=np.int64)
    transform = restricted_grid(sm, 0, a, budgets)

    r2 = r2_dense(X, budgets)
    folded = r2[:X].copy()
    folded[0] += r2[X]
    s_values = np.fft.fft(folded)

    contributions = (transform * s_values).real / X
    total = math.fsum(contributions.tolist())

    owner, centers = _major_arc_owner(X, partition)
    major_mask = owner >= 0
    major = math.fsum(contributions[major_mask].tolist())
    minor = math.fsum(contributions[~major_mask].tolist())

    per_arc = np.bincount(owner[major_mask], weights=contributions[major_mask], minlength=len(centers))
    points = np.bincount(owner[major_mask], minlength=len(centers))
    arcs = [
        {
            "center": f"{r}/{s}",
            "r": r,
            "s": s,
            "points": int(points[i]),
            "contribution": float(per_arc[i]),
            "abs_contribution": abs(float(per_arc[i])),
        }
        for i, (r, s) in enumerate(centers)
    ]

    buckets = []
    if with_buckets:
        grouped: dict[tuple[int, int], list[float]] = {}
        for idx in np.flatnonzero(~major_mask).tolist():
            arc = classify_arc(idx, X, partition)
            S, D = (arc.S, arc.D) if isinstance(arc, MinorArc) else (0, 0)
            grouped.setdefault((S, D), []).append(float(contributions[idx]))
        buckets = [
            {"S": S, "D": D, "points": len(vals), "contribution": math.fsum(vals)}
            for (S, D), vals in sorted(grouped.items())
        ]

    if ledger is None:
        ledger = build_ledger(X, ds, budgets=budgets)
    exact = ledger.sum_r2

    logger.info(f"Plancherel X={X} ds={ds}: total={total:.6g} exact={exact:.6g} major={major:.6g}")
    return MainTermReport(
        X=X,
        ds=ds.to_text(),
        total=total,
        major=major,
        minor=minor,
        exact=exact,
        arcs=arcs,
        buckets=buckets,
    )
