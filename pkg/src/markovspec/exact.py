"""Exact arithmetic for values of eventually periodic continued fractions.

Such values are quadratic irrationals ``(a + b*sqrt(d)) / c``.  Sums of them
(two-sided continued fraction values) are kept as :class:`RadicalSum`, a
rational combination of square roots.  Square roots of integers whose pairwise
products are not perfect squares are linearly independent over Q, so a sum with
all coefficients zero is the only way to represent zero.  That makes equality
decidable and sign determination terminate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

Rational = Union[int, Fraction]

_SMALL_PRIMES: tuple[int, ...] = tuple(
    p for p in range(2, 1000) if all(p % q for q in range(2, int(p**0.5) + 1))
)


def is_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


@lru_cache(maxsize=65536)
def split_square(n: int) -> tuple[int, int]:
    """Return (s, d) with n = s*s*d, stripping square factors of small primes.

    A residual large square factor may survive in d; every equality test below
    goes through perfect-square checks, so that does not affect correctness.
    """
    if n <= 0:
        raise ValueError("radicand must be positive")
    if is_square(n):
        return math.isqrt(n), 1
    s = 1
    for p in _SMALL_PRIMES:
        pp = p * p
        if pp > n:
            break
        while n % pp == 0:
            n //= pp
            s *= p
    r = math.isqrt(n)
    if r * r == n:
        return s * r, 1
    return s, n


@dataclass(frozen=True)
class QuadIrr:
    """The number (a + b*sqrt(d)) / c in canonical form.

    Canonical: c > 0, gcd(a, b, c) = 1, and b = 0 exactly when the value is
    rational (then d = 0).
    """

    a: int
    b: int
    c: int
    d: int

    @staticmethod
    def make(a: int, b: int, c: int, d: int) -> "QuadIrr":
        if c == 0:
            raise ZeroDivisionError("QuadIrr denominator is zero")
        if d < 0:
            raise ValueError("negative radicand")
        if b == 0 or d == 0:
            b, d = 0, 0
        else:
            s, d = split_square(d)
            b *= s
            if d == 1:
                a, b, d = a + b, 0, 0
        if c < 0:
            a, b, c = -a, -b, -c
        g = math.gcd(math.gcd(a, b), c)
        return QuadIrr(a // g, b // g, c // g, d)

    @staticmethod
    def rational(q: Rational) -> "QuadIrr":
        q = Fraction(q)
        return QuadIrr.make(q.numerator, 0, q.denominator, 0)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def mobius(self, p: int, pp: int, q: int, qq: int) -> "QuadIrr":
        """Return (p + pp*x) / (q + qq*x) for x = self."""
        a, b, c, d = self.a, self.b, self.c, self.d
        u, v = p * c + pp * a, pp * b
        s, t = q * c + qq * a, qq * b
        if b == 0:
            return QuadIrr.make(u, 0, s, 0)
        den = s * s - t * t * d
        return QuadIrr.make(u * s - v * t * d, v * s - u * t, den, d)

    def __add__(self, other: "QuadIrr | Rational") -> "RadicalSum":
        return RadicalSum.of(self) + other

    def to_sum(self) -> "RadicalSum":
        return RadicalSum.of(self)

    def enclosure(self, bits: int) -> "RatInterval":
        return RadicalSum.of(self).enclosure(bits)

    def __float__(self) -> float:
        return (self.a + self.b * math.sqrt(self.d)) / self.c

    def __str__(self) -> str:
        if self.b == 0:
            return str(Fraction(self.a, self.c))
        sign = "+" if self.b > 0 else "-"
        bb = "" if abs(self.b) == 1 else str(abs(self.b))
        num = f"{self.a} {sign} {bb}√{self.d}" if self.a else f"{'-' if self.b < 0 else ''}{bb}√{self.d}"
        return f"({num})/{self.c}" if self.c != 1 else num


def _merge_key(terms: dict[int, Fraction], d: int) -> tuple[int, Fraction]:
    """Find an existing radicand k with sqrt(d) = r*sqrt(k); return (k, r)."""
    for k in terms:
        if k == d:
            return k, Fraction(1)
        if k != 1 and d != 1:
            prod = k * d
            if is_square(prod):
                return k, Fraction(math.isqrt(prod), k)
    return d, Fraction(1)


class RadicalSum:
    """A finite sum r_0 + sum_i r_i*sqrt(d_i) with independent radicals.

    Stored as a mapping radicand -> rational coefficient (radicand 1 holds the
    rational part).  Instances are immutable by convention.
    """

    __slots__ = ("terms", "_hash", "_approx")

    def __init__(self, terms: dict[int, Fraction] | None = None):
        self.terms: dict[int, Fraction] = {k: v for k, v in (terms or {}).items() if v}
        self._hash: int | None = None
        self._approx: dict[int, tuple[int, int]] = {}

    @staticmethod
    def of(x: "QuadIrr | RadicalSum | Rational") -> "RadicalSum":
        if isinstance(x, RadicalSum):
            return x
        if isinstance(x, QuadIrr):
            terms: dict[int, Fraction] = {}
            if x.a:
                terms[1] = Fraction(x.a, x.c)
            if x.b:
                terms[x.d] = Fraction(x.b, x.c)
            return RadicalSum(terms)
        return RadicalSum({1: Fraction(x)})

    def __add__(self, other: "RadicalSum | QuadIrr | Rational") -> "RadicalSum":
        other = RadicalSum.of(other)
        terms = dict(self.terms)
        for d, r in other.terms.items():
            k, scale = (1, Fraction(1)) if d == 1 else _merge_key(terms, d)
            terms[k] = terms.get(k, Fraction(0)) + r * scale
        return RadicalSum(terms)

    __radd__ = __add__

    def __neg__(self) -> "RadicalSum":
        return RadicalSum({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "RadicalSum | QuadIrr | Rational") -> "RadicalSum":
        return self + (-RadicalSum.of(other))

    def __rsub__(self, other: "RadicalSum | QuadIrr | Rational") -> "RadicalSum":
        return RadicalSum.of(other) + (-self)

    def scale(self, r: Rational) -> "RadicalSum":
        r = Fraction(r)
        return RadicalSum({k: v * r for k, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_rational(self) -> bool:
        return all(k == 1 for k in self.terms)

    def _scaled_bounds(self, bits: int) -> tuple[int, int]:
        """Integers lo, hi with lo <= self * 2**bits <= hi."""
        cached = self._approx.get(bits)
        if cached is not None:
            return cached
        den = 1
        for v in self.terms.values():
            den = den * v.denominator // math.gcd(den, v.denominator)
        lo = hi = 0
        for d, v in self.terms.items():
            n = v.numerator * (den // v.denominator)
            if d == 1:
                lo += n << bits
                hi += n << bits
                continue
            s = math.isqrt(d << (2 * bits))
            if n >= 0:
                lo += n * s
                hi += n * (s + 1)
            else:
                lo += n * (s + 1)
                hi += n * s
        # divide by den with outward rounding
        res = (lo // den, -((-hi) // den))
        self._approx[bits] = res
        return res

    def enclosure(self, bits: int) -> "RatInterval":
        lo, hi = self._scaled_bounds(bits)
        return RatInterval(Fraction(lo, 1 << bits), Fraction(hi, 1 << bits))

    def sign(self) -> int:
        if not self.terms:
            return 0
        bits = 64
        while True:
            lo, hi = self._scaled_bounds(bits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, (RadicalSum, QuadIrr, int, Fraction)):
            return NotImplemented
        return (self - RadicalSum.of(other)).is_zero()

    def __hash__(self) -> int:
        # only rational parts hash reliably across merges; good enough for dict keys
        if self._hash is None:
            self._hash = hash(tuple(sorted(self.terms.items())))
        return self._hash

    def __lt__(self, other: "RadicalSum | QuadIrr | Rational") -> bool:
        return (self - RadicalSum.of(other)).sign() < 0

    def __le__(self, other: "RadicalSum | QuadIrr | Rational") -> bool:
        return (self - RadicalSum.of(other)).sign() <= 0

    def __gt__(self, other: "RadicalSum | QuadIrr | Rational") -> bool:
        return (self - RadicalSum.of(other)).sign() > 0

    def __ge__(self, other: "RadicalSum | QuadIrr | Rational") -> bool:
        return (self - RadicalSum.of(other)).sign() >= 0

    def __float__(self) -> float:
        # via the exact enclosure, so tiny differences keep their relative accuracy
        lo, hi = self._scaled_bounds(256)
        return float(Fraction(lo + hi, 1 << 257))

    def __repr__(self) -> str:
        return f"RadicalSum({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for d in sorted(self.terms):
            v = self.terms[d]
            parts.append(str(v) if d == 1 else f"{v}*√{d}")
        return " + ".join(parts)


def rsum(values: Iterable["RadicalSum | QuadIrr | Rational"]) -> RadicalSum:
    total = RadicalSum()
    for v in values:
        total = total + v
    return total


@dataclass(frozen=True)
class RatInterval:
    """Closed interval [lo, hi] with rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @staticmethod
    def point(x: Rational) -> "RatInterval":
        x = Fraction(x)
        return RatInterval(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __add__(self, other: "RatInterval | Rational") -> "RatInterval":
        if isinstance(other, RatInterval):
            return RatInterval(self.lo + other.lo, self.hi + other.hi)
        return RatInterval(self.lo + other, self.hi + other)

    def __sub__(self, other: "RatInterval | Rational") -> "RatInterval":
        if isinstance(other, RatInterval):
            return RatInterval(self.lo - other.hi, self.hi - other.lo)
        return RatInterval(self.lo - other, self.hi - other)

    def __contains__(self, x: object) -> bool:
        if isinstance(x, RatInterval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, (RadicalSum, QuadIrr)):
            return self.lo <= RadicalSum.of(x) <= self.hi
        return self.lo <= x <= self.hi  # type: ignore[operator]

    def overlaps(self, other: "RatInterval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def hull(self, other: "RatInterval") -> "RatInterval":
        return RatInterval(min(self.lo, other.lo), max(self.hi, other.hi))

    def __str__(self) -> str:
        return f"[{float(self.lo):.17g}, {float(self.hi):.17g}]"
