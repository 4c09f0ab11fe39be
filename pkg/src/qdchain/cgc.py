"""Exact Clebsch-Gordan coefficients in the Condon-Shortley convention.

Angular momenta are passed as ``Fraction`` (or anything Fraction accepts);
internally everything is doubled to integers and evaluated with exact
rational arithmetic, so signs and surds are reproducible to the last bit
before the final float conversion.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

__all__ = ["clebsch_gordan", "triangle_ok", "half_int_range"]


def _as_doubled(x) -> int:
    f = Fraction(x)
    d = f * 2
    if d.denominator != 1:
        raise ValueError(f"{x} is not a half-integer")
    return int(d)


def triangle_ok(j1, j2, j) -> bool:
    a, b, c = _as_doubled(j1), _as_doubled(j2), _as_doubled(j)
    return abs(a - b) <= c <= a + b and (a + b + c) % 2 == 0


def half_int_range(lo, hi):
    """Half-integers lo, lo+1, ..., hi as Fractions."""
    a, b = _as_doubled(lo), _as_doubled(hi)
    return [Fraction(k, 2) for k in range(a, b + 1, 2)]


@lru_cache(maxsize=None)
def _cg_doubled(j1: int, m1: int, j2: int, m2: int, j: int, m: int) -> float:
    if m1 + m2 != m:
        return 0.0
    if not (abs(j1 - j2) <= j <= j1 + j2) or (j1 + j2 + j) % 2 != 0:
        return 0.0
    if abs(m1) > j1 or abs(m2) > j2 or abs(m) > j or (j1 + m1) % 2 or (j2 + m2) % 2:
        return 0.0

    def fact(d: int) -> int:
        # d is a doubled value that must be an even non-negative integer
        assert d % 2 == 0 and d >= 0
        return math.factorial(d // 2)

    pref = Fraction(j + 1)  # (2j+1) in doubled units: j doubled -> j+1 = 2J+1
    pref *= Fraction(
        fact(j1 + j2 - j) * fact(j1 - j2 + j) * fact(-j1 + j2 + j),
        fact(j1 + j2 + j + 2),
    )
    pref *= (
        fact(j + m) * fact(j - m)
        * fact(j1 - m1) * fact(j1 + m1)
        * fact(j2 - m2) * fact(j2 + m2)
    )

    k_lo = max(0, -(j - j2 + m1) // 2, -(j - j1 - m2) // 2)
    k_hi = min((j1 + j2 - j) // 2, (j1 - m1) // 2, (j2 + m2) // 2)
    total = Fraction(0)
    for k in range(k_lo, k_hi + 1):
        d = (
            math.factorial(k)
            * fact(j1 + j2 - j - 2 * k)
            * fact(j1 - m1 - 2 * k)
            * fact(j2 + m2 - 2 * k)
            * fact(j - j2 + m1 + 2 * k)
            * fact(j - j1 - m2 + 2 * k)
        )
        total += Fraction(-1 if k % 2 else 1, d)
    if total == 0:
        return 0.0
    sign = 1.0 if total > 0 else -1.0
    return sign * math.sqrt(float(total * total * pref))


def clebsch_gordan(j1, m1, j2, m2, j, m) -> float:
    """<j1 m1; j2 m2 | j m> with Condon-Shortley phases."""
    return _cg_doubled(
        _as_doubled(j1), _as_doubled(m1),
        _as_doubled(j2), _as_doubled(m2),
        _as_doubled(j), _as_doubled(m),
    )
