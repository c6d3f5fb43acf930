"""Representation ledger models."""

import math
from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import Optional

import polars as pl

from src.models.digitset import DigitSet


@dataclass(frozen=True, order=True)
class Representation:
    """Ordered prime pair (p, q) with p² + q² = n."""

    n: int
    p: int
    q: int

    def __post_init__(self):
        if self.p * self.p + self.q * self.q != self.n:
            raise ValueError(f"{self.p}^2 + {self.q}^2 != {self.n}")

    @property
    def multiset(self) -> tuple[int, int]:
        return (min(self.p, self.q), max(self.p, self.q))


@dataclass(frozen=True)
class GaussianSplit:
    """p₁+iq₁ = (a+ib)(c+id) and p₂+iq₂ = unit·(a+ib)(c−id)."""

    common: tuple[int, int]
    cofactor: tuple[int, int]
    unit: tuple[int, int]


@dataclass
class CollisionQuadruple:
    """Two representations of one n with different prime multisets."""

    first: Representation
    second: Representation
    gaussian: Optional[GaussianSplit] = None
    degenerate: bool = False

    @property
    def n(self) -> int:
        return self.first.n

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "p1": self.first.p,
            "q1": self.first.q,
            "p2": self.second.p,
            "q2": self.second.q,
            "gaussian": asdict(self.gaussian) if self.gaussian else None,
            "degenerate": self.degenerate,
        }


@dataclass
class LedgerSummary:
    """Aggregates of one ledger; what the cache stores and the reports read."""

    X: int
    ds: str
    member_count: int
    sum_r2: float
    sum_r_star: int
    sum_r_star_sq: int
    nonzero: int
    above_two: int
    quadruple_count: int
    defect_sum: int
    diagonal_reps: int
    large_pairs: int
    histogram: dict[int, int] = field(default_factory=dict)
    r1_mass: Optional[float] = None
    tilde_sum: Optional[int] = None
    tilde_sum_sq: Optional[int] = None
    tilde_nonzero: Optional[int] = None

    @property
    def log_x(self) -> float:
        return math.log(self.X)

    @property
    def bracket_lower(self) -> float:
        """(log X^{1/4})² · #{(p,q): p,q > X^{1/4}, p²+q² ∈ A(X)}."""
        return (self.log_x / 4) ** 2 * self.large_pairs

    @property
    def bracket_upper(self) -> float:
        """(log √X)² · Σ r★."""
        return (self.log_x / 2) ** 2 * self.sum_r_star

    @property
    def bracket_holds(self) -> bool:
        return self.bracket_lower < self.sum_r2 <= self.bracket_upper

    @property
    def cauchy_schwarz_lower(self) -> float:
        if self.sum_r_star_sq == 0:
            return 0.0
        return self.sum_r_star**2 / self.sum_r_star_sq

    @property
    def sandwich_holds(self) -> bool:
        # (Σr)² ≤ #{r>0}·Σr² in integers avoids rounding
        return (
            self.sum_r_star**2 <= self.nonzero * self.sum_r_star_sq
            and self.nonzero <= self.sum_r_star
        )

    @property
    def above_two_bound(self) -> Optional[float]:
        """⅓ Σ_{r★≥2} (r★² − 2r★) from the histogram."""
        if not self.histogram:
            return None
        return sum(c * (r * r - 2 * r) for r, c in self.histogram.items() if r >= 2) / 3

    def to_dict(self) -> dict:
        data = asdict(self)
        data["histogram"] = {str(r): c for r, c in sorted(self.histogram.items())}
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "LedgerSummary":
        data = dict(data)
        data["histogram"] = {int(r): int(c) for r, c in data.get("histogram", {}).items()}
        return cls(**data)


@dataclass
class RepresentationLedger:
    """Member-sum prime pairs up to X plus the weighted accumulators.

    `pairs` holds unordered prime pairs p ≤ q with p² + q² ∈ A(X), sorted by
    (n, p). Ordered counts follow by weighting p < q twice.
    """

    X: int
    ds: DigitSet
    pairs: pl.DataFrame
    member_count: int
    sum_r2: float
    large_pairs: int
    r1_mass: Optional[float] = None
    tilde_sum: Optional[int] = None
    tilde_sum_sq: Optional[int] = None
    tilde_nonzero: Optional[int] = None

    @cached_property
    def per_n(self) -> pl.DataFrame:
        """One row per n with r★ (ordered), Σw² over multisets and multiset count."""
        weighted = self.pairs.with_columns(
            pl.when(pl.col("p") == pl.col("q")).then(1).otherwise(2).cast(pl.Int64).alias("w")
        )
        return (
            weighted.group_by("n")
            .agg(
                pl.col("w").sum().alias("r_star"),
                (pl.col("w") * pl.col("w")).sum().alias("w_sq"),
                pl.len().alias("multisets"),
                (pl.col("p") == pl.col("q")).sum().cast(pl.Int64).alias("diagonal"),
            )
            .sort("n")
        )

    def r_star_of(self, n: int) -> int:
        row = self.per_n.filter(pl.col("n") == n)
        return int(row["r_star"][0]) if row.height else 0

    def representations(self, n: int) -> list[Representation]:
        """Ordered representations of n stored in the ledger."""
        reps = []
        for p, q in self.pairs.filter(pl.col("n") == n).select("p", "q").iter_rows():
            reps.append(Representation(n, p, q))
            if p != q:
                reps.append(Representation(n, q, p))
        return sorted(reps)

    @property
    def sum_r_star(self) -> int:
        return int(self.per_n["r_star"].sum() or 0)

    @property
    def sum_r_star_sq(self) -> int:
        return int((self.per_n["r_star"] * self.per_n["r_star"]).sum() or 0)

    @property
    def nonzero(self) -> int:
        return self.per_n.height

    def histogram(self) -> dict[int, int]:
        counts = self.per_n.group_by("r_star").agg(pl.len().alias("count")).sort("r_star")
        return {int(r): int(c) for r, c in counts.iter_rows()}

    @property
    def quadruple_count(self) -> int:
        """Ordered pairs of ordered representations with distinct multisets."""
        return int((self.per_n["r_star"] * self.per_n["r_star"] - self.per_n["w_sq"]).sum() or 0)

    @property
    def defect_sum(self) -> int:
        return int((self.per_n["r_star"] * self.per_n["r_star"] - 2 * self.per_n["r_star"]).sum() or 0)

    @property
    def diagonal_reps(self) -> int:
        return int(self.per_n["diagonal"].sum() or 0)

    def summary(self) -> LedgerSummary:
        hist = self.histogram()
        return LedgerSummary(
            X=self.X,
            ds=self.ds.to_text(),
            member_count=self.member_count,
            sum_r2=self.sum_r2,
            sum_r_star=self.sum_r_star,
            sum_r_star_sq=self.sum_r_star_sq,
            nonzero=self.nonzero,
            above_two=sum(c for r, c in hist.items() if r > 2),
            quadruple_count=self.quadruple_count,
            defect_sum=self.defect_sum,
            diagonal_reps=self.diagonal_reps,
            large_pairs=self.large_pairs,
            histogram=hist,
            r1_mass=self.r1_mass,
            tilde_sum=self.tilde_sum,
            tilde_sum_sq=self.tilde_sum_sq,
            tilde_nonzero=self.tilde_nonzero,
        )
