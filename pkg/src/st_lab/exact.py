"""Exact handling of quantities like ``c * m**(2/3) / n**(1/3)``.

Every threshold in the pipeline is a rational multiple of a cube root of
a rational, so comparisons with integers reduce to comparing cubes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering


def parse_rational(text) -> Fraction:
    if isinstance(text, Fraction):
        return text
    if isinstance(text, float):
        raise TypeError("pass rationals as strings like '1/20'")
    return Fraction(str(text).strip())


def _iroot3(n: int) -> int:
    """Floor of the real cube root of a nonnegative integer."""
    if n < 2:
        return n
    k = 1 << ((n.bit_length() + 2) // 3)
    while True:
        nxt = (2 * k + n // (k * k)) // 3
        if nxt >= k:
            break
        k = nxt
    while k**3 > n:
        k -= 1
    while (k + 1) ** 3 <= n:
        k += 1
    return k


def icbrt_floor(q) -> int:
    """Largest integer k with k**3 <= q."""
    q = Fraction(q)
    if q < 0:
        return -icbrt_ceil(-q)
    # k**3 is an integer, so k**3 <= q iff k**3 <= floor(q)
    return _iroot3(q.numerator // q.denominator)


def icbrt_ceil(q) -> int:
    q = Fraction(q)
    k = icbrt_floor(q)
    return k if k**3 == q else k + 1


@total_ordering
@dataclass(frozen=True)
class CubeRootMultiple:
    """The real number ``coef * radicand**(1/3)`` with rational parts.

    ``coef`` must be nonnegative and ``radicand`` positive.
    """

    coef: Fraction
    radicand: Fraction

    def __post_init__(self):
        object.__setattr__(self, "coef", Fraction(self.coef))
        object.__setattr__(self, "radicand", Fraction(self.radicand))
        if self.coef < 0 or self.radicand <= 0:
            raise ValueError("need coef >= 0 and radicand > 0")

    @property
    def cube(self) -> Fraction:
        return self.coef**3 * self.radicand

    def __float__(self) -> float:
        return float(self.coef) * float(self.radicand) ** (1 / 3)

    def _cmp(self, other) -> int:
        if isinstance(other, CubeRootMultiple):
            a, b = self.cube, other.cube
        else:
            o = Fraction(other)
            if o < 0:
                return 1
            a, b = self.cube, o**3
        return (a > b) - (a < b)

    def __eq__(self, other):
        if not isinstance(other, (CubeRootMultiple, int, Fraction)):
            return NotImplemented
        return self._cmp(other) == 0

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __hash__(self):
        return hash(self.cube)

    def ceil(self) -> int:
        return icbrt_ceil(self.cube)

    def __str__(self):
        return f"{self.coef}*cbrt({self.radicand})"

