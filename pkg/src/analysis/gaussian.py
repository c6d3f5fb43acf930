"""Gaussian integers and the splitting of prime-square collisions."""

import logging
from dataclasses import dataclass

from src.errors import DegenerateCollisionError, InvalidConfigError
from src.models.ledger import CollisionQuadruple, GaussianSplit, Representation

logger = logging.getLogger(__name__)


def _round_div(x: int, n: int) -> int:
    """Nearest integer to x/n for n > 0, halves rounded up."""
    return (2 * x + n) // (2 * n)


@dataclass(frozen=True)
class GaussianInteger:
    """a + bi with exact integer parts."""

    re: int
    im: int

    def __add__(self, other: "GaussianInteger") -> "GaussianInteger":
        return GaussianInteger(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussianInteger") -> "GaussianInteger":
        return GaussianInteger(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "GaussianInteger") -> "GaussianInteger":
        return GaussianInteger(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __divmod__(self, other: "GaussianInteger") -> tuple["GaussianInteger", "GaussianInteger"]:
        """Euclidean division with the quotient rounded to the nearest lattice point."""
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by the Gaussian integer 0")
        num = self * other.conj()
        quotient = GaussianInteger(_round_div(num.re, n), _round_div(num.im, n))
        return quotient, self - quotient * other

    def conj(self) -> "GaussianInteger":
        return GaussianInteger(self.re, -self.im)

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def normalize(self) -> "GaussianInteger":
        """Associate in the first quadrant (re > 0, im ≥ 0); 0 stays 0."""
        z = self
        for _ in range(4):
            if z.re > 0 and z.im >= 0:
                return z
            z = z * I
        return z

    def as_tuple(self) -> tuple[int, int]:
        return (self.re, self.im)

    def __str__(self) -> str:
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


ONE = GaussianInteger(1, 0)
I = GaussianInteger(0, 1)
UNITS = (ONE, I, GaussianInteger(-1, 0), GaussianInteger(0, -1))


def gcd(z: GaussianInteger, w: GaussianInteger) -> GaussianInteger:
    """Normalized greatest common divisor by the Euclidean algorithm."""
    while not w.is_zero():
        _, rem = divmod(z, w)
        z, w = w, rem
    return z.normalize()


def gaussian_factor_collision(rep1: Representation, rep2: Representation) -> CollisionQuadruple:
    """
    Split p₁² + q₁² = p₂² + q₂² through the Gaussian gcd.

    With z = gcd(p₁+iq₁, p₂+iq₂) and c = (p₁+iq₁)/z, a proper split has
    p₂+iq₂ = unit·z·conj(c). When no unit works the quadruple is returned
    with degenerate=True.

    Args:
        rep1: First representation
        rep2: Second representation of the same n

    Returns:
        CollisionQuadruple with the Gaussian split when one exists

    Raises:
        DegenerateCollisionError: Both representations use the same primes
    """
    if rep1.n != rep2.n:
        raise InvalidConfigError(f"representations of different n: {rep1.n} != {rep2.n}")
    if rep1.multiset == rep2.multiset:
        raise DegenerateCollisionError(
            f"degenerate collision: {rep1.multiset} is the same prime multiset in both representations"
        )

    z1 = GaussianInteger(rep1.p, rep1.q)
    z2 = GaussianInteger(rep2.p, rep2.q)
    common = gcd(z1, z2)
    cofactor, rem = divmod(z1, common)
    if not rem.is_zero():
        raise ArithmeticError(f"gcd {common} does not divide {z1}")

    partner = common * cofactor.conj()
    for unit in UNITS:
        if unit * partner == z2:
            split = GaussianSplit(
                common=common.as_tuple(),
                cofactor=cofactor.as_tuple(),
                unit=unit.as_tuple(),
            )
            return CollisionQuadruple(first=rep1, second=rep2, gaussian=split)

    logger.warning(f"Degenerate collision at n={rep1.n}: gcd {common} gives no conjugate split")
    return CollisionQuadruple(first=rep1, second=rep2, degenerate=True)


def verify_split(quad: CollisionQuadruple) -> bool:
    """Recompute both products and the norm identity exactly."""
    if quad.gaussian is None:
        return False
    common = GaussianInteger(*quad.gaussian.common)
    cofactor = GaussianInteger(*quad.gaussian.cofactor)
    unit = GaussianInteger(*quad.gaussian.unit)
    first = common * cofactor
    second = unit * common * cofactor.conj()
    return (
        first == GaussianInteger(quad.first.p, quad.first.q)
        and second == GaussianInteger(quad.second.p, quad.second.q)
        and common.norm() * cofactor.norm() == quad.n
    )
