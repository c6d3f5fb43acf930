"""Exact argument reduction for e(x) = exp(2πix)."""

import math
from fractions import Fraction
from typing import Union

import numpy as np

Real = Union[int, float, Fraction]

_INT64_SAFE = 2**62


def as_fraction(x: Real) -> Fraction:
    """Exact rational value of x (floats are dyadic rationals)."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def frac(x: Fraction) -> Fraction:
    """x mod 1 in [0, 1)."""
    return x - math.floor(x)


def e(x: Real) -> complex:
    """e(x) with x reduced mod 1 exactly before the trigonometric call."""
    reduced = float(frac(as_fraction(x)))
    angle = 2 * math.pi * reduced
    return complex(math.cos(angle), math.sin(angle))


def fractional_phases(alpha: Real, values: np.ndarray) -> np.ndarray:
    """
    (alpha · v) mod 1 as float64 for every integer v, reduced exactly.

    Args:
        alpha: Rational or float multiplier
        values: Nonnegative integer array

    Returns:
        Array of phases in [0, 1)
    """
    a = as_fraction(alpha)
    num, den = a.numerator % a.denominator, a.denominator
    values = np.asarray(values, dtype=np.int64)
    if values.size == 0:
        return np.zeros(0, dtype=np.float64)

    vmax = int(values.max())
    if num * vmax < _INT64_SAFE and den < _INT64_SAFE:
        residues = (values * num) % den
        return residues.astype(np.float64) / den

    # products overflow int64: exact Python integers
    residues = [(int(v) * num) % den for v in values.tolist()]
    return np.array([r / den for r in residues], dtype=np.float64)


def unit_vectors(phases: np.ndarray) -> np.ndarray:
    """e(phase) for an array of reduced phases."""
    return np.exp(2j * np.pi * phases)
