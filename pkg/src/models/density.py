"""Local density and singular series models."""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from src.errors import InvalidConfigError
from src.models.digitset import DigitSet


class DensityKind(Enum):
    """Which modular count a LocalDensityTable holds."""

    RHO = "rho"
    RHO_TILDE = "rho_tilde"
    R_UNRESTRICTED = "r_unrestricted"
    RHO_QUAD = "rho_quad"

    @classmethod
    def from_string(cls, value: str) -> "DensityKind":
        normalized = value.strip().lower().replace("-", "_")
        for kind in cls:
            if kind.value == normalized:
                return kind
        raise InvalidConfigError(f"unknown density kind {value!r}")


class SeriesVariant(Enum):
    """Singular series flavours.

    S        - one forbidden digit, g/(g−1)(1 − ρ(b;g)/φ²(g))
    S_TILDE  - the ρ̃ analogue, g/(g−t)(1 − Σ ρ̃(bᵢ;g)/(gφ(g)))
    S_VECTOR - several forbidden digits, g/(g−t)(1 − Σ ρ(bᵢ;g)/φ²(g))
    S_LOCAL  - the finite-J local sum at the depth where it stops changing
    """

    S = "S"
    S_TILDE = "S_tilde"
    S_VECTOR = "S_vector"
    S_LOCAL = "S_local"

    @classmethod
    def from_string(cls, value: str) -> "SeriesVariant":
        normalized = value.strip().lower()
        for variant in cls:
            if variant.value.lower() == normalized:
                return variant
        raise InvalidConfigError(f"unknown singular series variant {value!r}")


@dataclass
class LocalDensityTable:
    """Exact counts indexed by residue mod q."""

    q: int
    kind: DensityKind
    values: list[int] = field(default_factory=list)

    @property
    def mass(self) -> int:
        return sum(self.values)

    def __getitem__(self, a: int) -> int:
        return self.values[a % self.q]

    def to_rows(self) -> list[dict]:
        return [{"q": self.q, "a": a, "value": v} for a, v in enumerate(self.values)]

    def to_dict(self) -> dict:
        return {"q": self.q, "kind": self.kind.value, "values": list(self.values)}


@dataclass
class SingularSeries:
    """Exact singular series value."""

    ds: DigitSet
    value: Fraction
    variant: SeriesVariant

    def to_dict(self) -> dict:
        return {
            "ds": self.ds.to_text(),
            "variant": self.variant.value,
            "value": f"{self.value.numerator}/{self.value.denominator}",
            "decimal": float(self.value),
        }


@dataclass
class FiniteJSum:
    """Major-arc local sum over admissible residues mod g^J."""

    ds: DigitSet
    J: int
    value: Fraction

    @property
    def g(self) -> int:
        return self.ds.g

    def to_dict(self) -> dict:
        return {
            "ds": self.ds.to_text(),
            "J": self.J,
            "value": f"{self.value.numerator}/{self.value.denominator}",
            "decimal": float(self.value),
        }
