"""Local densities, their oracles and the singular series.

All counts are exact integers and every series value is a Fraction. Closed
forms are only used after agreeing with the double-loop oracle.
"""

import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np
from sympy import factorint, legendre_symbol, totient

from src.analysis.digits import string_values
from src.errors import InvalidConfigError, check_budget
from src.models.density import (
    DensityKind,
    FiniteJSum,
    LocalDensityTable,
    SeriesVariant,
    SingularSeries,
)
from src.models.digitset import DigitSet, StringModel
from src.models.experiment import Budgets

logger = logging.getLogger(__name__)

CERTIFY_LIMIT = 2000
MAX_LOCAL_MODULUS = 10**7
MAX_MOMENT_MODULUS = 4096


def phi(q: int) -> int:
    return int(totient(q))


def chi4(p: int) -> int:
    """+1 for p ≡ 1 mod 4, −1 for p ≡ 3 mod 4, 0 for p = 2."""
    if p % 2 == 0:
        return 0
    return 1 if p % 4 == 1 else -1


def _check_modulus(q: int) -> None:
    if q < 1:
        raise InvalidConfigError(f"modulus must be >= 1, got {q}")


def _square_residues(kind: DensityKind, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Squares of the u-range and v-range for one density kind."""
    ell = np.arange(q, dtype=np.int64)
    units = ell[np.gcd(ell, q) == 1]
    if kind is DensityKind.RHO:
        u, v = units, units
    elif kind is DensityKind.RHO_TILDE:
        u, v = units, ell
    elif kind is DensityKind.R_UNRESTRICTED:
        u, v = ell, ell
    else:
        raise InvalidConfigError(f"{kind.value} is not a residue-indexed density")
    return (u * u) % q, (v * v) % q


def bruteforce_table(kind: DensityKind, q: int, budgets: Optional[Budgets] = None) -> LocalDensityTable:
    """Every residue at once by enumerating all (u, v) pairs mod q."""
    _check_modulus(q)
    check_budget("brute-force modulus", q, (budgets or Budgets()).max_bruteforce_modulus)
    usq, vsq = _square_residues(kind, q)
    counts = np.zeros(q, dtype=np.int64)
    # row blocks keep the pair matrix small
    block = max(1, 4_000_000 // max(vsq.size, 1))
    for start in range(0, usq.size, block):
        sums = (usq[start : start + block, None] + vsq[None, :]) % q
        counts += np.bincount(sums.ravel(), minlength=q)
    return LocalDensityTable(q=q, kind=kind, values=[int(c) for c in counts])


def rho_bruteforce(
    a: int,
    q: int,
    kind: DensityKind = DensityKind.RHO,
    budgets: Optional[Budgets] = None,
) -> int:
    """
    #{(u, v) mod q : u² + v² ≡ a} by a double loop, with the unit conditions of `kind`.

    Args:
        a: Residue in [0, q)
        q: Modulus, at most the brute-force budget (10⁶ by default)
        kind: RHO (both units), RHO_TILDE (u a unit) or R_UNRESTRICTED

    Returns:
        Exact count
    """
    _check_modulus(q)
    check_budget("brute-force modulus", q, (budgets or Budgets()).max_bruteforce_modulus)
    if not 0 <= a < q:
        raise InvalidConfigError(f"residue {a} outside [0, {q})")
    usq, vsq = _square_residues(kind, q)
    targets = (a - usq) % q
    hist = np.bincount(vsq, minlength=q)
    return int(hist[targets].sum())


@lru_cache(maxsize=None)
def _convolution_table(kind: DensityKind, q: int) -> tuple[int, ...]:
    """Cyclic self-convolution of square histograms mod q."""
    usq, vsq = _square_residues(kind, q)
    hu = np.bincount(usq, minlength=q)
    hv = np.bincount(vsq, minlength=q)
    table = np.zeros(q, dtype=np.int64)
    for x in np.flatnonzero(hu).tolist():
        table += int(hu[x]) * np.roll(hv, x)
    return tuple(int(t) for t in table)


def _rho_odd_closed_form(nu: int, p: int) -> int:
    """ρ(ν;p) for odd p: (1+χ₄(p))(p−1) at ν ≡ 0, else p − 2 − χ₄(p) − 2(ν/p)."""
    nu %= p
    if nu == 0:
        return (1 + chi4(p)) * (p - 1)
    return p - 2 - chi4(p) - 2 * legendre_symbol(nu, p)


@lru_cache(maxsize=None)
def _certified_odd_table(p: int) -> tuple[int, ...]:
    """Closed-form ρ(·;p), replaced by the oracle if the two ever disagree."""
    closed = tuple(_rho_odd_closed_form(nu, p) for nu in range(p))
    oracle = tuple(bruteforce_table(DensityKind.RHO, p).values)
    if closed != oracle:
        logger.warning(f"Closed form for rho mod {p} disagrees with the oracle; using the oracle")
        return oracle
    return closed


def _rho_odd_prime(nu: int, p: int, certify_limit: int = CERTIFY_LIMIT) -> int:
    if p <= certify_limit:
        return _certified_odd_table(p)[nu % p]
    return _rho_odd_closed_form(nu, p)


def _rho_prime_power(nu: int, p: int, e: int, certify_limit: int = CERTIFY_LIMIT) -> int:
    """ρ(ν;p^e) by lifting from p (odd p) or the dyadic rules."""
    if p == 2:
        if e == 1:
            return 1 if nu % 2 == 0 else 0
        if e == 2:
            return 4 if nu % 4 == 2 else 0
        return 2 ** (e + 1) if nu % 8 == 2 else 0
    return p ** (e - 1) * _rho_odd_prime(nu, p, certify_limit)


def rho(a: int, q: int, certify_limit: int = CERTIFY_LIMIT) -> int:
    """ρ(a;q) via CRT over prime powers, lifting and the certified odd-prime form.

    Odd primes up to certify_limit are checked against the brute-force oracle once.
    """
    _check_modulus(q)
    value = 1
    for p, e in factorint(q).items():
        value *= _rho_prime_power(a % p**e, p, e, certify_limit)
        if value == 0:
            return 0
    return value


def _crt_from_tables(kind: DensityKind, a: int, q: int) -> int:
    _check_modulus(q)
    value = 1
    for p, e in factorint(q).items():
        pe = p**e
        check_budget("prime-power modulus", pe, MAX_LOCAL_MODULUS)
        value *= _convolution_table(kind, pe)[a % pe]
        if value == 0:
            return 0
    return value


def rho_tilde(a: int, q: int) -> int:
    """ρ̃(a;q): u a unit, v arbitrary; per-prime-power counts joined by CRT."""
    return _crt_from_tables(DensityKind.RHO_TILDE, a, q)


def r_unrestricted(nu: int, s: int) -> int:
    """r(ν;s) = #{(ℓ₁, ℓ₂) mod s : ℓ₁² + ℓ₂² ≡ ν}."""
    return _crt_from_tables(DensityKind.R_UNRESTRICTED, nu, s)


def local_table(kind: DensityKind, q: int) -> LocalDensityTable:
    """Full residue table of one kind through the production path."""
    _check_modulus(q)
    if kind is DensityKind.RHO:
        values = [rho(a, q) for a in range(q)]
    elif kind is DensityKind.RHO_TILDE:
        values = [rho_tilde(a, q) for a in range(q)]
    elif kind is DensityKind.R_UNRESTRICTED:
        values = [r_unrestricted(a, q) for a in range(q)]
    else:
        raise InvalidConfigError("rho_quad tables are indexed by (a, b), use rho_quad")
    return LocalDensityTable(q=q, kind=kind, values=values)


def rho_quad_bruteforce(h: int, a: int, b: int) -> int:
    """Pairs (v₁, v₂) mod h with (av₁−bv₂)(av₁+bv₂)(av₂+bv₁)(av₂−bv₁) ≡ 0."""
    _check_modulus(h)
    check_budget("rho_quad brute-force modulus", h, 5000)
    v = np.arange(h, dtype=np.int64)
    v1, v2 = v[:, None], v[None, :]
    a, b = a % h, b % h
    product = (a * v1 - b * v2) % h
    product = (product * ((a * v1 + b * v2) % h)) % h
    product = (product * ((a * v2 + b * v1) % h)) % h
    product = (product * ((a * v2 - b * v1) % h)) % h
    return int(np.count_nonzero(product == 0))


def _rho_quad_prime_closed_form(p: int, a: int, b: int) -> int:
    """Zero set of four lines through the origin in F_p²: 1 + L(p−1) points."""
    a, b = a % p, b % p
    if a == 0 and b == 0:
        return p * p
    if a == 0 or b == 0:
        return 2 * p - 1
    if p == 2:
        return p
    if pow(a, 4, p) == pow(b, 4, p):
        return 2 * p - 1
    return 4 * p - 3


@lru_cache(maxsize=None)
def _rho_quad_prime(p: int, a: int, b: int) -> int:
    closed = _rho_quad_prime_closed_form(p, a, b)
    if p <= 200:
        oracle = rho_quad_bruteforce(p, a, b)
        if oracle != closed:
            logger.warning(f"rho_quad closed form disagrees at p={p}, a={a}, b={b}; using oracle")
            return oracle
    return closed


def rho_quad(h: int, a: int, b: int) -> int:
    """
    ρ(h;a,b) by CRT: prime factors use the line-count closed form, higher
    prime powers are counted directly.
    """
    _check_modulus(h)
    value = 1
    for p, e in factorint(h).items():
        if e == 1:
            value *= _rho_quad_prime(p, a % p, b % p)
        else:
            value *= rho_quad_bruteforce(p**e, a, b)
    return value


def stable_depth(g: int) -> int:
    """Smallest J from which the finite-J local sum no longer depends on J.

    Odd primes only see ν mod p; the prime 2 sees ν mod 8 once 8 | g^J.
    """
    v2 = 0
    while g % 2 == 0:
        g //= 2
        v2 += 1
    if v2 == 0:
        return 1
    return max(1, math.ceil(3 / v2))


def _digits_forbidden(ds: DigitSet) -> list[int]:
    if not ds.forbidden:
        return []
    return sorted(ds.forbidden)


def singular_series(
    ds: DigitSet, variant: SeriesVariant = SeriesVariant.S, certify_limit: int = CERTIFY_LIMIT
) -> SingularSeries:
    """
    Exact singular series of the digit set.

    Args:
        ds: Digit set
        variant: S needs one forbidden digit; S_VECTOR and S_TILDE take any t;
            S_LOCAL is the finite-J sum at stable_depth(g)
        certify_limit: Largest odd prime whose closed form is oracle-checked

    Returns:
        SingularSeries with a Fraction value
    """
    g, t = ds.g, ds.t
    if variant is SeriesVariant.S_LOCAL:
        value = singular_series_J(ds, stable_depth(g), certify_limit).value
        return SingularSeries(ds=ds, value=value, variant=variant)

    if variant is SeriesVariant.S and t != 1:
        raise InvalidConfigError("variant S needs exactly one forbidden digit; use S_vector")

    phi_g = phi(g)
    prefactor = Fraction(g, g - t)
    if variant is SeriesVariant.S_TILDE:
        mass = sum(rho_tilde(b, g) for b in _digits_forbidden(ds))
        value = prefactor * (1 - Fraction(mass, g * phi_g))
    else:
        mass = sum(rho(b, g, certify_limit) for b in _digits_forbidden(ds))
        value = prefactor * (1 - Fraction(mass, phi_g * phi_g))
    return SingularSeries(ds=ds, value=value, variant=variant)


def _prime_power_tables(
    m: int, kind: DensityKind, certify_limit: int = CERTIFY_LIMIT
) -> list[tuple[int, np.ndarray]]:
    """Per-prime-power residue tables for CRT evaluation over arrays."""
    tables = []
    for p, e in factorint(m).items():
        pe = p**e
        if kind is DensityKind.RHO:
            values = [_rho_prime_power(nu, p, e, certify_limit) for nu in range(pe)]
        else:
            values = list(_convolution_table(kind, pe))
        tables.append((pe, np.array(values, dtype=np.int64)))
    return tables


def _evaluate_crt(residues: np.ndarray, tables: list[tuple[int, np.ndarray]]) -> np.ndarray:
    out = np.ones(residues.shape, dtype=np.int64)
    for pe, table in tables:
        out *= table[residues % pe]
    return out


def singular_series_J(ds: DigitSet, J: int, certify_limit: int = CERTIFY_LIMIT) -> FiniteJSum:
    """
    g^J/(g−t)^J · Σ_{admissible ν mod g^J} ρ(ν;g^J)/φ²(g^J).

    Admissible ν are the J-digit strings (leading zeros included) over the
    allowed digits.
    """
    if J < 1:
        raise InvalidConfigError(f"J must be >= 1, got {J}")
    g, t = ds.g, ds.t
    m = g**J
    check_budget("local modulus g^J", m, MAX_LOCAL_MODULUS)

    nu = string_values(StringModel(ds, J))
    values = _evaluate_crt(nu, _prime_power_tables(m, DensityKind.RHO, certify_limit))
    total = sum(values.tolist())
    phi_m = phi(m)
    value = Fraction(g**J, (g - t) ** J) * Fraction(total, phi_m * phi_m)
    return FiniteJSum(ds=ds, J=J, value=value)


def local_second_moment_J(ds: DigitSet, J: int) -> Fraction:
    """
    g^J/(g−t)^J · Σ_{admissible f mod g^J} g^{−4J} Σ_{vμ ≡ f} r(μ;g^J) r(v;g^J).
    """
    if J < 1:
        raise InvalidConfigError(f"J must be >= 1, got {J}")
    g, t = ds.g, ds.t
    m = g**J
    check_budget("second-moment modulus g^J", m, MAX_MOMENT_MODULUS)

    residues = np.arange(m, dtype=np.int64)
    r = _evaluate_crt(residues, _prime_power_tables(m, DensityKind.R_UNRESTRICTED))
    convolved = np.zeros(m, dtype=np.int64)
    for v in range(m):
        if r[v] == 0:
            continue
        np.add.at(convolved, (v * residues) % m, int(r[v]) * r)

    admissible = string_values(StringModel(ds, J))
    total = sum(convolved[admissible].tolist())
    return Fraction(g**J, (g - t) ** J) * Fraction(total, g ** (4 * J))


def mass_identity(kind: DensityKind, q: int) -> int:
    """Expected Σ over residues: φ(q)², qφ(q) or q²."""
    if kind is DensityKind.RHO:
        return phi(q) ** 2
    if kind is DensityKind.RHO_TILDE:
        return q * phi(q)
    if kind is DensityKind.R_UNRESTRICTED:
        return q * q
    raise InvalidConfigError(f"no mass identity for {kind.value}")
