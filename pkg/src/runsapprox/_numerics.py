"""Small summation helpers shared by the exact and bound modules."""

import math
from fractions import Fraction


def is_exact(values):
    return any(isinstance(v, Fraction) for v in values)


def accurate_sum(values):
    """Exact sum for rationals, correctly rounded sum for floats."""
    values = list(values)
    if not values:
        return 0  # neutral for both Fraction and float arithmetic
    if is_exact(values):
        return sum(values, Fraction(0))
    return math.fsum(values)


def to_exact(x):
    """Convert ``x`` to a Fraction.

    Floats convert via their exact binary value; strings such as ``"1/5"`` or
    ``"0.2"`` are parsed as decimal rationals.
    """
    return x if isinstance(x, Fraction) else Fraction(x)
