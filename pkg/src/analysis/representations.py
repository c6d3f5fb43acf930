"""Representation counts n = a² + b² over missing-digit integers."""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

import numpy as np
import polars as pl
from sympy import isprime

from src.analysis.digits import count_leq, member_mask
from src.analysis.gaussian import gaussian_factor_collision
from src.data.primes import sieve
from src.errors import InvalidConfigError, check_budget
from src.models.digitset import DigitSet
from src.models.experiment import Budgets
from src.models.ledger import CollisionQuadruple, Representation, RepresentationLedger

logger = logging.getLogger(__name__)

PAIR_SCHEMA = {"n": pl.Int64, "p": pl.Int64, "q": pl.Int64}

ProgressCallback = Callable[[int, int, str], None]


@dataclass
class _ChunkTask:
    """Everything one worker needs; picklable for the process pool."""

    X: int
    ds: DigitSet
    a_values: np.ndarray
    a_logs: np.ndarray
    a_prime: np.ndarray
    prime_powers: np.ndarray
    log_values: np.ndarray
    prime_mask: np.ndarray
    with_tilde: bool


@dataclass
class _ChunkResult:
    r2_terms: list[float] = field(default_factory=list)
    r1_terms: list[float] = field(default_factory=list)
    n: list[np.ndarray] = field(default_factory=list)
    p: list[np.ndarray] = field(default_factory=list)
    q: list[np.ndarray] = field(default_factory=list)
    large_pairs: int = 0
    tilde_n: list[np.ndarray] = field(default_factory=list)


def _ledger_chunk(task: _ChunkTask) -> _ChunkResult:
    """Accumulate all ledger statistics for one block of first coordinates."""
    X, ds = task.X, task.ds
    pp, logs, prime_mask = task.prime_powers, task.log_values, task.prime_mask
    quarter = math.isqrt(math.isqrt(X))
    # p⁴ > X exactly when p > floor(X^{1/4})
    large_b = pp > quarter

    out = _ChunkResult()
    for a, log_a, a_is_prime in zip(
        task.a_values.tolist(), task.a_logs.tolist(), task.a_prime.tolist()
    ):
        bmax = math.isqrt(X - a * a)
        stop = int(np.searchsorted(pp, bmax, side="right"))
        b = pp[:stop]
        n = a * a + b * b
        mask = member_mask(n, ds)
        out.r2_terms.append(log_a * math.fsum(logs[:stop][mask].tolist()))

        if a_is_prime:
            both = mask & prime_mask[:stop]
            if a > quarter:
                out.large_pairs += int(np.count_nonzero(both & large_b[:stop]))
            keep = both & (b >= a)
            if keep.any():
                out.n.append(n[keep])
                out.p.append(np.full(int(keep.sum()), a, dtype=np.int64))
                out.q.append(b[keep])

        if task.with_tilde:
            every_b = np.arange(1, bmax + 1, dtype=np.int64)
            every_n = a * a + every_b * every_b
            members = every_n[member_mask(every_n, ds)]
            out.r1_terms.append(log_a * members.size)
            if a_is_prime:
                out.tilde_n.append(members)
    return out


def _empty_pairs() -> pl.DataFrame:
    return pl.DataFrame(schema=PAIR_SCHEMA)


def build_ledger(
    X: int,
    ds: DigitSet,
    workers: int = 1,
    chunk_size: int = 64,
    budgets: Optional[Budgets] = None,
    progress_callback: Optional[ProgressCallback] = None,
) -> RepresentationLedger:
    """
    Enumerate ordered prime-power pairs with a² + b² ≤ X and a member sum.

    Args:
        X: Bound, at most the ledger budget (10¹¹)
        ds: Digit set
        workers: Process count; the result does not depend on it
        chunk_size: First coordinates per task
        budgets: Desk budgets
        progress_callback: Optional (step, total, message) callback

    Returns:
        RepresentationLedger with the prime pairs and every accumulator
    """
    budgets = budgets or Budgets()
    if X < 1:
        raise InvalidConfigError(f"ledger needs X >= 1, got {X}")
    check_budget("ledger X", X, budgets.max_ledger_x)
    if workers < 1:
        raise InvalidConfigError(f"workers must be >= 1, got {workers}")
    with_tilde = X <= budgets.tilde_max_x
    if not with_tilde:
        logger.warning(f"Skipping r1 and r~* statistics: X={X} above tilde_max_x={budgets.tilde_max_x}")

    root = math.isqrt(X)
    member_count = count_leq(X, ds)
    if root < 2:
        return RepresentationLedger(
            X=X,
            ds=ds,
            pairs=_empty_pairs(),
            member_count=member_count,
            sum_r2=0.0,
            large_pairs=0,
            r1_mass=0.0 if with_tilde else None,
            tilde_sum=0 if with_tilde else None,
            tilde_sum_sq=0 if with_tilde else None,
            tilde_nonzero=0 if with_tilde else None,
        )

    table = sieve(2, root, budgets=budgets)
    pp, logs = table.prime_powers, table.log_values
    prime_mask = table.is_prime_power_prime()

    tasks = [
        _ChunkTask(
            X=X,
            ds=ds,
            a_values=pp[start : start + chunk_size],
            a_logs=logs[start : start + chunk_size],
            a_prime=prime_mask[start : start + chunk_size],
            prime_powers=pp,
            log_values=logs,
            prime_mask=prime_mask,
            with_tilde=with_tilde,
        )
        for start in range(0, pp.size, chunk_size)
    ]
    logger.info(f"Building ledger X={X} ds={ds}: {pp.size} prime powers in {len(tasks)} chunks")

    results: list[_ChunkResult] = []
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for i, result in enumerate(pool.map(_ledger_chunk, tasks)):
                results.append(result)
                if progress_callback:
                    progress_callback(i + 1, len(tasks), f"ledger chunk {i + 1}/{len(tasks)}")
    else:
        for i, task in enumerate(tasks):
            results.append(_ledger_chunk(task))
            if progress_callback:
                progress_callback(i + 1, len(tasks), f"ledger chunk {i + 1}/{len(tasks)}")

    def gather(name: str) -> np.ndarray:
        parts = [arr for res in results for arr in getattr(res, name)]
        return np.concatenate(parts) if parts else np.array([], dtype=np.int64)

    pairs = pl.DataFrame(
        {"n": gather("n"), "p": gather("p"), "q": gather("q")}, schema=PAIR_SCHEMA
    ).sort(["n", "p"])

    sum_r2 = math.fsum(term for res in results for term in res.r2_terms)
    large_pairs = sum(res.large_pairs for res in results)

    r1_mass = tilde_sum = tilde_sum_sq = tilde_nonzero = None
    if with_tilde:
        r1_mass = math.fsum(term for res in results for term in res.r1_terms)
        _, counts = np.unique(gather("tilde_n"), return_counts=True)
        tilde_sum = int(counts.sum())
        tilde_sum_sq = int((counts * counts).sum())
        tilde_nonzero = int(counts.size)

    logger.info(f"Ledger X={X}: {pairs.height} prime multisets, Σr2={sum_r2:.6g}")
    return RepresentationLedger(
        X=X,
        ds=ds,
        pairs=pairs,
        member_count=member_count,
        sum_r2=sum_r2,
        large_pairs=large_pairs,
        r1_mass=r1_mass,
        tilde_sum=tilde_sum,
        tilde_sum_sq=tilde_sum_sq,
        tilde_nonzero=tilde_nonzero,
    )


def r_star(n: int) -> tuple[int, list[Representation]]:
    """Ordered prime pairs (p, q) with p² + q² = n, by scanning p ≤ √n."""
    if n < 1:
        raise InvalidConfigError(f"r_star needs n >= 1, got {n}")
    reps = []
    for p in range(2, math.isqrt(n) + 1):
        if not isprime(p):
            continue
        rest = n - p * p
        q = math.isqrt(rest)
        if q >= 2 and q * q == rest and isprime(q):
            reps.append(Representation(n, p, q))
    return len(reps), reps


def off_diagonal_count(
    X: int,
    ds: DigitSet,
    ledger: Optional[RepresentationLedger] = None,
    **kwargs,
) -> tuple[int, int]:
    """(quadruple_count, defect_sum) over n ∈ A(X)."""
    ledger = ledger or build_ledger(X, ds, **kwargs)
    return ledger.quadruple_count, ledger.defect_sum


def nonzero_count(
    X: int,
    ds: DigitSet,
    ledger: Optional[RepresentationLedger] = None,
    **kwargs,
) -> tuple[int, int, dict[int, int]]:
    """#{r★ > 0}, #{r★ > 2} and the histogram of r★ over n ∈ A(X)."""
    ledger = ledger or build_ledger(X, ds, **kwargs)
    histogram = ledger.histogram()
    above_two = sum(c for r, c in histogram.items() if r > 2)
    return ledger.nonzero, above_two, histogram


def collisions(ledger: RepresentationLedger) -> Iterator[CollisionQuadruple]:
    """Every pair of distinct prime multisets sharing one n, Gaussian split attached."""
    crowded = ledger.per_n.filter(pl.col("multisets") >= 2).select("n")
    runs = ledger.pairs.join(crowded, on="n", how="semi").sort(["n", "p"])
    for (n,), run in runs.group_by(["n"], maintain_order=True):
        rows = list(run.select("p", "q").iter_rows())
        for i in range(len(rows)):
            for j in range(i + 1, len(rows)):
                first = Representation(n, *rows[i])
                second = Representation(n, *rows[j])
                yield gaussian_factor_collision(first, second)


def short_interval_r2(
    t: int,
    H: int,
    budgets: Optional[Budgets] = None,
) -> tuple[float, float]:
    """
    Σ_{t < n ≤ t+H} r₂(n) and the predicted π/4 · H.

    Args:
        t: Interval start, t ≥ 0
        H: Interval length, H ≥ 1
        budgets: Desk budgets (the sieve runs up to √(t+H))

    Returns:
        (exact weighted sum, main term)
    """
    if t < 0 or H < 1:
        raise InvalidConfigError(f"short interval needs t >= 0 and H >= 1, got t={t}, H={H}")
    top = t + H
    main_term = math.pi / 4 * H
    root = math.isqrt(top)
    if root < 2:
        return 0.0, main_term
    table = sieve(2, root, budgets=budgets)
    pp, logs = table.prime_powers, table.log_values

    terms = []
    for a, log_a in zip(pp.tolist(), logs.tolist()):
        low = t - a * a
        lo = 0 if low < 0 else int(np.searchsorted(pp, math.isqrt(low), side="right"))
        if top - a * a < 4:
            break
        hi = int(np.searchsorted(pp, math.isqrt(top - a * a), side="right"))
        if hi > lo:
            terms.append(log_a * math.fsum(logs[lo:hi].tolist()))
    return math.fsum(terms), main_term


def lattice_count_ap(x: int, q: int, u: int, v: int) -> tuple[int, float, float]:
    """
    #{a, b ≥ 1 : a² + b² ≤ x, a ≡ u, b ≡ v mod q} with its main term (π/4)x/q².

    Returns:
        (count, main term, |count − main term|)
    """
    if not (0 < u <= q and 0 < v <= q):
        raise InvalidConfigError(f"lattice count needs 0 < u, v <= q, got u={u}, v={v}, q={q}")
    if x < 1:
        raise InvalidConfigError(f"lattice count needs x >= 1, got {x}")
    if q**4 > x:
        logger.debug(f"q={q} above x^(1/4) for x={x}; error term is not guaranteed")

    count = 0
    a = u
    while a * a < x:
        bmax = math.isqrt(x - a * a)
        if bmax >= v:
            count += (bmax - v) // q + 1
        a += q
    main_term = math.pi / 4 * x / (q * q)
    return count, main_term, abs(count - main_term)


def lattice_constant(x: int, q: int, error: float) -> float:
    """Fitted C in |count − main| ≤ C√x/q."""
    return error / (math.sqrt(x) / q)
