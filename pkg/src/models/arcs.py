"""Rational approximation, arc partition and exponential-sum models."""

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

from src.errors import InvalidConfigError


@dataclass(frozen=True)
class RationalApprox:
    """alpha = r/s + xi with gcd(r, s) = 1, s ≤ Q and |xi| ≤ 1/(sQ)."""

    alpha: Fraction
    r: int
    s: int
    xi: Fraction
    Q: int

    @property
    def xi_float(self) -> float:
        return float(self.xi)

    def to_dict(self) -> dict:
        return {
            "alpha": float(self.alpha),
            "r": self.r,
            "s": self.s,
            "xi": float(self.xi),
            "Q": self.Q,
        }


class ArcMode(Enum):
    """Arc shapes: (log X)^B arcs or exp(η √log X) arcs."""

    POWER_LOG = "power-log"
    ETA = "eta"

    @classmethod
    def from_string(cls, value: str) -> "ArcMode":
        normalized = value.strip().lower()
        for mode in cls:
            if mode.value == normalized:
                return mode
        raise InvalidConfigError(f"unknown arc mode {value!r}")


@dataclass(frozen=True)
class ArcPartition:
    """Major arcs |a/X − r/s| ≤ width/X for s ≤ denominator_bound."""

    X: int
    mode: ArcMode = ArcMode.POWER_LOG
    width_exponent: float = 2.0
    eta_scale: float = 0.5
    dirichlet_exponent: float = 0.75

    def __post_init__(self):
        if self.X < 2:
            raise InvalidConfigError(f"arc partition needs X >= 2, got {self.X}")

    @property
    def width(self) -> float:
        """Half-width measured in units of 1/X."""
        log_x = math.log(self.X)
        if self.mode is ArcMode.POWER_LOG:
            return log_x**self.width_exponent
        return math.exp(self.eta_scale * math.sqrt(log_x))

    @property
    def denominator_bound(self) -> int:
        return max(1, math.floor(self.width))

    @property
    def dirichlet_q(self) -> int:
        return max(2, math.floor(self.X**self.dirichlet_exponent))

    def to_dict(self) -> dict:
        return {
            "X": self.X,
            "mode": self.mode.value,
            "width_exponent": self.width_exponent,
            "eta_scale": self.eta_scale,
            "width": self.width,
            "denominator_bound": self.denominator_bound,
            "dirichlet_q": self.dirichlet_q,
        }


@dataclass(frozen=True)
class MajorArc:
    """a/X = r/s + eta/X inside a major arc."""

    r: int
    s: int
    eta: Fraction

    @property
    def center(self) -> str:
        return f"{self.r}/{self.s}"


@dataclass(frozen=True)
class MinorArc:
    """a/X outside every major arc, with its Dirichlet approximation and dyadic scales."""

    r: int
    s: int
    xi: Fraction
    S: int
    D: int


ArcClass = Union[MajorArc, MinorArc]


@dataclass
class ExpSumValue:
    """A directly evaluated exponential sum and its diagnostics."""

    alpha: float
    value: complex
    terms: int
    trivial_bound: float
    envelope: Optional[float] = None
    extra: dict = field(default_factory=dict)

    @property
    def fitted_constant(self) -> Optional[float]:
        """|value| / envelope, the measured implied constant."""
        if not self.envelope:
            return None
        return abs(self.value) / self.envelope

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "value_re": self.value.real,
            "value_im": self.value.imag,
            "abs": abs(self.value),
            "terms": self.terms,
            "trivial_bound": self.trivial_bound,
            "envelope": self.envelope,
            "fitted_constant": self.fitted_constant,
            **self.extra,
        }


@dataclass
class MainTermReport:
    """Plancherel split of Σ_{n∈A(X)} r₂(n) into major and minor arcs."""

    X: int
    ds: str
    total: float
    major: float
    minor: float
    exact: float
    arcs: list[dict] = field(default_factory=list)
    buckets: list[dict] = field(default_factory=list)

    @property
    def relative_error(self) -> float:
        return abs(self.total - self.exact) / abs(self.exact) if self.exact else abs(self.total)

    @property
    def major_share(self) -> float:
        return self.major / self.total if self.total else 0.0

    @property
    def minor_saving(self) -> float:
        """|minor| / total."""
        return abs(self.minor) / abs(self.total) if self.total else 0.0

    def to_dict(self) -> dict:
        return {
            "X": self.X,
            "ds": self.ds,
            "total": self.total,
            "major": self.major,
            "minor": self.minor,
            "exact": self.exact,
            "relative_error": self.relative_error,
            "major_share": self.major_share,
            "minor_saving": self.minor_saving,
        }
