"""Missing-digit set models."""

import math
from dataclasses import dataclass, field
from typing import Optional

from src.errors import InvalidConfigError


@dataclass(frozen=True)
class DigitSet:
    """Integers whose base-g expansion avoids every forbidden digit.

    An empty forbidden set is allowed and describes all integers; it is used
    as an oracle baseline.
    """

    g: int
    forbidden: frozenset[int] = field(default_factory=frozenset)
    label: str = ""

    def __post_init__(self):
        if self.g < 2:
            raise InvalidConfigError(f"base must be >= 2, got {self.g}")
        object.__setattr__(self, "forbidden", frozenset(int(d) for d in self.forbidden))
        bad = sorted(d for d in self.forbidden if not 0 <= d < self.g)
        if bad:
            raise InvalidConfigError(f"forbidden digits {bad} outside [0, {self.g - 1}]")
        remaining = self.g - len(self.forbidden)
        # a lone allowed digit must be nonzero, otherwise A = {0}
        if remaining < 1 or (remaining == 1 and 0 not in self.forbidden):
            raise InvalidConfigError(
                f"g={self.g} with forbidden {sorted(self.forbidden)} must leave two allowed digits or one nonzero digit"
            )

    @property
    def t(self) -> int:
        """Number of forbidden digits."""
        return len(self.forbidden)

    @property
    def allowed(self) -> tuple[int, ...]:
        return tuple(d for d in range(self.g) if d not in self.forbidden)

    @property
    def zero_allowed(self) -> bool:
        return 0 not in self.forbidden

    @property
    def single_digit(self) -> Optional[int]:
        """The forbidden digit b when exactly one digit is excluded."""
        if self.t == 1:
            return next(iter(self.forbidden))
        return None

    @classmethod
    def single(cls, g: int, b: int) -> "DigitSet":
        return cls(g=g, forbidden=frozenset({b}))

    @classmethod
    def singles(cls, g: int) -> list["DigitSet"]:
        """Every one-digit exclusion of base g that is a valid digit set."""
        # g = 2 with 1 forbidden leaves only 0
        return [cls.single(g, b) for b in range(g) if g > 2 or b == 0]

    @classmethod
    def unrestricted(cls, g: int) -> "DigitSet":
        return cls(g=g, forbidden=frozenset(), label="unrestricted")

    @classmethod
    def parse(cls, text: str) -> "DigitSet":
        """Parse the text form "g=10;forbidden=7" (forbidden may be a comma list or empty)."""
        values: dict[str, str] = {}
        for part in text.split(";"):
            part = part.strip()
            if not part:
                continue
            key, sep, value = part.partition("=")
            if not sep:
                raise InvalidConfigError(f"malformed digit set component {part!r}")
            values[key.strip().lower()] = value.strip()

        if "g" not in values:
            raise InvalidConfigError(f"digit set {text!r} has no base")
        try:
            g = int(values["g"])
            forbidden = frozenset(
                int(d) for d in values.get("forbidden", "").split(",") if d.strip()
            )
        except ValueError as e:
            raise InvalidConfigError(f"malformed digit set {text!r}: {e}") from e
        return cls(g=g, forbidden=forbidden, label=values.get("label", ""))

    def to_text(self) -> str:
        forbidden = ",".join(str(d) for d in sorted(self.forbidden))
        return f"g={self.g};forbidden={forbidden}"

    def to_dict(self) -> dict:
        return {
            "g": self.g,
            "forbidden": sorted(self.forbidden),
            "label": self.label,
            "text": self.to_text(),
        }

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class StringModel:
    """All k-position digit strings over the allowed digits (X = g^k)."""

    ds: DigitSet
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise InvalidConfigError(f"k must be >= 1, got {self.k}")

    @property
    def X(self) -> int:
        return self.ds.g**self.k

    @property
    def cardinality(self) -> int:
        """(g - t)^k, the all-zero string included when 0 is allowed."""
        return len(self.ds.allowed) ** self.k

    def to_dict(self) -> dict:
        return {"ds": self.ds.to_text(), "k": self.k, "X": self.X}


@dataclass
class FourierValue:
    """String-model transform at theta plus the correction to A(X) = A ∩ [1, X]."""

    theta: float
    value: complex
    k: int
    correction: complex = 0j

    @property
    def restricted_value(self) -> complex:
        """Σ_{n ∈ A(X)} e(θn)."""
        return self.value + self.correction

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "value": [self.value.real, self.value.imag],
            "abs": abs(self.value),
            "k": self.k,
            "correction": [self.correction.real, self.correction.imag],
        }


def alpha_from_constant(C_g: float, g: int, t: int = 1) -> float:
    """α_g = log(C_g · g/(g−t) · log g) / log g."""
    return math.log(C_g * (g / (g - t)) * math.log(g)) / math.log(g)


@dataclass
class FourierDecayReport:
    """Measured L¹ constant, derived α_g and the optional L∞ decay rate.

    C_g_estimate is a lower proxy: it comes from a finite θ grid.
    """

    ds: DigitSet
    k: int
    C_g_estimate: float
    alpha_g: float
    c_g_estimate: Optional[float] = None
    samples: list[tuple[float, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "ds": self.ds.to_text(),
            "k": self.k,
            "C_g_estimate": self.C_g_estimate,
            "alpha_g": self.alpha_g,
            "c_g_estimate": self.c_g_estimate,
            "samples": [list(s) for s in self.samples],
        }


@dataclass
class HybridSumReport:
    """Hybrid sum over arcs S ≤ s < 2S, |η| < D against its bound shape."""

    S: int
    D: int
    measured: float
    bound: float
    points: int

    @property
    def ratio(self) -> float:
        return self.measured / self.bound if self.bound else math.inf

    def to_dict(self) -> dict:
        return {
            "S": self.S,
            "D": self.D,
            "measured": self.measured,
            "bound": self.bound,
            "ratio": self.ratio,
            "points": self.points,
        }

