"""Continued fractions: convergents, cylinders, exact values and enclosures."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Union

from .exact import QuadIrr, RadicalSum, RatInterval, Rational
from .words import (
    Finite,
    Free,
    MarkedBiSequence,
    MarkedWord,
    Periodic,
    Tail,
    Word,
    as_word,
    split_tail,
)

INITIAL_DEPTH = 64
MAX_DEPTH = 4096
PRECISION_FLOOR = Fraction(1, 10**40)
MAX_BITS = 4 * MAX_DEPTH


# ------------------------------------------------------------ convergents


def convergents(w: Sequence[int], with_integer_part: bool = False) -> list[tuple[int, int]]:
    """Convergents p_k/q_k of [0; w] (or of [w0; w1, ...] when asked)."""
    w = as_word(w)
    if with_integer_part:
        p0, q0, p1, q1 = 1, 0, w[0], 1
        out = [(p1, q1)]
        rest = w[1:]
    else:
        p0, q0, p1, q1 = 1, 0, 0, 1
        out = []
        rest = w
    for a in rest:
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        out.append((p1, q1))
    return out


@lru_cache(maxsize=200_000)
def mobius(w: Word) -> tuple[int, int, int, int]:
    """(p, pp, q, qq) with [0; w, t] = (p + pp*t)/(q + qq*t) for a tail value t.

    Here ``[0; w, t]`` means the continued fraction whose partial quotients are
    w followed by those of t = [0; b1, b2, ...].  So p/q is the last convergent
    of [0; w] and pp/qq the one before it.
    """
    p, pp, q, qq = 0, 1, 1, 0
    for a in w:
        p, pp, q, qq = a * p + pp, p, a * q + qq, q
    return p, pp, q, qq


def apply_mobius(m: tuple[int, int, int, int], t: Fraction) -> Fraction:
    p, pp, q, qq = m
    return (p + pp * t) / (q + qq * t)


def cylinder_size(w: Sequence[int]) -> Fraction:
    """Length of the cylinder I(w) = {[0; w, ...]}: 1/(q_n (q_n + q_{n-1}))."""
    w = as_word(w)
    if not w:
        raise ValueError("cylinder of the empty word")
    _, _, q, q_prev = mobius(w)
    return Fraction(1, q * (q + q_prev))


# ---------------------------------------------------------- exact values


@lru_cache(maxsize=100_000)
def eval_periodic(period: Word) -> QuadIrr:
    """Exact value of [0; period, period, ...]."""
    period = as_word(period)
    if not period:
        raise ValueError("empty period")
    p, pp, q, qq = mobius(period)
    # x = (p + pp*x)/(q + qq*x)  =>  qq x^2 + (q - pp) x - p = 0
    b = q - pp
    disc = b * b + 4 * qq * p
    if qq == 0:
        return QuadIrr.rational(Fraction(p, q - pp))
    return QuadIrr.make(-b, 1, 2 * qq, disc)


@lru_cache(maxsize=400_000)
def eval_eventually_periodic(prefix: Word, period: Word) -> QuadIrr:
    """Exact value of [0; prefix, period, period, ...]."""
    return eval_periodic(period).mobius(*mobius(prefix))


def alternating_extremes(alphabet: int) -> tuple[QuadIrr, QuadIrr]:
    """(min, max) of [0; b1, b2, ...] over digits b_i in 1..alphabet."""
    if alphabet == 1:
        v = eval_periodic((1,))
        return v, v
    return eval_periodic((alphabet, 1)), eval_periodic((1, alphabet))


def tail_range(prefix: Word, period: Word | None, alphabet: int | None) -> tuple[QuadIrr, QuadIrr]:
    """Exact (min, max) of [0; prefix, tail] over all admissible tails."""
    if period is not None:
        v = eval_eventually_periodic(prefix, period)
        return v, v
    lo, hi = alternating_extremes(alphabet or 1)
    m = mobius(prefix)
    a, b = lo.mobius(*m), hi.mobius(*m)
    # the map is increasing in the tail value iff len(prefix) is even
    return (a, b) if len(prefix) % 2 == 0 else (b, a)


def enclose_cf(prefix: Sequence[int], tail: Tail, depth: int = INITIAL_DEPTH) -> RatInterval:
    """Rational interval holding [a0; a1, ...] for every completion of the tail.

    The partial quotients are ``prefix`` followed by the tail digits, the first
    one being the integer part.  An empty prefix means integer part 0.  Tails
    are unrolled to ``depth`` partial quotients and closed off with the
    convergent sandwich; free digits are bounded by the alternating tails.
    """
    prefix = as_word(prefix)
    a0, rest = (prefix[0], prefix[1:]) if prefix else (0, ())
    known, period, alphabet = split_tail(tail)
    digits = rest + known
    if period is not None:
        reps = max(1, -(-(depth - len(digits)) // len(period)))
        digits = digits + period * reps
        m = mobius(digits)
        lo, hi = apply_mobius(m, Fraction(0)), apply_mobius(m, Fraction(1))
    else:
        if alphabet is None:
            raise ValueError("tail has neither period nor alphabet")
        if alphabet == 1:
            ext = [(1,)]
        else:
            ext = [(alphabet, 1), (1, alphabet)]
        lo = hi = None
        for per in ext:
            reps = max(1, -(-(depth - len(digits)) // len(per)))
            m = mobius(digits + per * reps)
            for t in (Fraction(0), Fraction(1)):
                v = apply_mobius(m, t)
                lo = v if lo is None or v < lo else lo
                hi = v if hi is None or v > hi else hi
    if lo > hi:
        lo, hi = hi, lo
    return RatInterval(a0 + lo, a0 + hi)


# ---------------------------------------------------------- SpectrumValue


class Ordering(enum.Enum):
    LESS = "Less"
    GREATER = "Greater"
    EQUAL = "Equal"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class SpectrumValue:
    """A real known to lie between two exact endpoints.

    When ``lower == upper`` the value is exact.  The rational enclosure is
    computed at ``bits`` of precision; :meth:`refine` doubles it.
    """

    lower: RadicalSum
    upper: RadicalSum
    bits: int = INITIAL_DEPTH

    @staticmethod
    def exactly(x: "RadicalSum | QuadIrr | Rational") -> "SpectrumValue":
        r = RadicalSum.of(x)
        return SpectrumValue(r, r)

    @property
    def is_exact(self) -> bool:
        return self.lower == self.upper

    @property
    def exact(self) -> RadicalSum | None:
        return self.lower if self.is_exact else None

    @property
    def enclosure(self) -> RatInterval:
        return RatInterval(self.lower.enclosure(self.bits).lo, self.upper.enclosure(self.bits).hi)

    def refine(self) -> "SpectrumValue":
        return SpectrumValue(self.lower, self.upper, min(2 * self.bits, MAX_BITS))

    def __add__(self, other: "SpectrumValue") -> "SpectrumValue":
        return SpectrumValue(self.lower + other.lower, self.upper + other.upper, max(self.bits, other.bits))

    def __float__(self) -> float:
        return float(self.enclosure.mid)

    def __str__(self) -> str:
        return to_decimal(self, 20)


def _as_bounds(t: "SpectrumValue | RadicalSum | QuadIrr | Rational") -> tuple[RadicalSum, RadicalSum]:
    if isinstance(t, SpectrumValue):
        return t.lower, t.upper
    r = RadicalSum.of(t)
    return r, r


def compare(v: "SpectrumValue | RadicalSum | QuadIrr | Rational",
            t: "SpectrumValue | RadicalSum | QuadIrr | Rational") -> Ordering:
    """Order v against t.  EQUAL needs both exact and identical."""
    vlo, vhi = _as_bounds(v)
    tlo, thi = _as_bounds(t)
    if vlo == vhi and tlo == thi:
        s = (vlo - tlo).sign()
        return Ordering.EQUAL if s == 0 else (Ordering.GREATER if s > 0 else Ordering.LESS)
    if vlo > thi:
        return Ordering.GREATER
    if vhi < tlo:
        return Ordering.LESS
    return Ordering.UNDECIDED


def to_decimal(v: "SpectrumValue | RadicalSum | QuadIrr | Rational", digits: int) -> str:
    """The first ``digits`` significant digits, truncated, with '…' if inexact.

    Digits are only printed when every point of the value's range agrees on
    them; an exact rational that terminates is printed without the marker.
    """
    lo, hi = _as_bounds(v)
    if lo != hi:
        bits = 4 * digits + 64
        sa = _digits_of(lo.enclosure(bits).lo, digits)[0]
        sb = _digits_of(hi.enclosure(bits).hi, digits)[0]
        return _common_prefix(sa, sb) + "…"
    if lo.is_rational:
        # a terminating rational sits on a digit boundary no enclosure can settle
        text, terminated = _digits_of(lo.terms.get(1, Fraction(0)), digits)
        return text if terminated else text + "…"
    bits = 64
    while True:
        enc = lo.enclosure(bits)
        sa, sb = _digits_of(enc.lo, digits), _digits_of(enc.hi, digits)
        if sa == sb:
            text, terminated = sa
            return text if lo.is_rational and terminated else text + "…"
        bits *= 2


def _digits_of(x: Fraction, digits: int) -> tuple[str, bool]:
    neg = x < 0
    x = abs(x)
    if x == 0:
        return "0", True
    e = 0
    while x >= 10**(e + 1):
        e += 1
    while x < 10**e:
        e -= 1
    scale = Fraction(10) ** (digits - 1 - e)
    n = x * scale
    whole = n.numerator // n.denominator
    exact = whole == n
    s = str(whole)
    point = e + 1
    if point <= 0:
        s = "0." + "0" * (-point) + s
    elif point < len(s):
        s = s[:point] + "." + s[point:]
    else:
        s = s + "0" * (point - len(s))
    return ("-" if neg else "") + s, exact


def _common_prefix(a: str, b: str) -> str:
    out = []
    for x, y in zip(a, b):
        if x != y:
            break
        out.append(x)
    return "".join(out)


# ------------------------------------------------------------- lambda_j


def side_range(known: Word, tail: Tail) -> tuple[QuadIrr, QuadIrr]:
    """(min, max) of [0; known, tail] over completions of the tail."""
    prefix, period, alphabet = split_tail(tail)
    return tail_range(known + prefix, period, alphabet)


def lambda0(s: MarkedBiSequence) -> SpectrumValue:
    """lambda_0 of every extension: [a0; a1, ...] + [0; a_-1, ...]."""
    a0 = s.middle[s.mark]
    right_lo, right_hi = side_range(s.middle[s.mark + 1:], s.right)
    left_lo, left_hi = side_range(tuple(reversed(s.middle[:s.mark])), s.left)
    lower = RadicalSum.of(a0) + right_lo + left_lo
    upper = RadicalSum.of(a0) + right_hi + left_hi
    return SpectrumValue(lower, upper)


def lambda_at(s: MarkedBiSequence, j: int) -> SpectrumValue:
    """lambda_j of the sequence (j relative to its mark)."""
    pos = s.mark + j
    if 0 <= pos < len(s.middle):
        return lambda0(MarkedBiSequence(s.left, s.middle, pos, s.right))
    try:
        return lambda0(s.shift(j))
    except ValueError:
        pass
    # the position lies in a free region: widen over the unknown digits
    return _lambda_in_free_region(s, j)


def _lambda_in_free_region(s: MarkedBiSequence, j: int, cap: int = 8) -> SpectrumValue:
    from itertools import product

    n = len(s.middle)
    if j + s.mark >= n:
        gap = j + s.mark - n + 1
        side = "right"
        prefix, period, alphabet = split_tail(s.right)
        gap -= len(prefix)
    else:
        gap = -(j + s.mark)
        side = "left"
        prefix, period, alphabet = split_tail(s.left)
        gap -= len(prefix)
    if gap > cap:
        raise ValueError("position too far into a free tail")
    lower = upper = None
    for fill in product(range(1, (alphabet or 1) + 1), repeat=gap):
        if side == "right":
            t = MarkedBiSequence(s.left, s.middle + prefix + fill, s.mark, Free(alphabet or 1))
        else:
            t = MarkedBiSequence(Free(alphabet or 1), tuple(reversed(prefix + fill)) + s.middle,
                                 s.mark + len(prefix) + gap, s.right)
        v = lambda_at(t, j)
        lower = v.lower if lower is None or v.lower < lower else lower
        upper = v.upper if upper is None or v.upper > upper else upper
    return SpectrumValue(lower, upper)


def bound_all_extensions(m: MarkedWord, alphabet: int | None = None) -> RatInterval:
    """Rational interval holding lambda_0 of every extension over 1..alphabet."""
    a = alphabet or m.alphabet
    v = lambda0(MarkedBiSequence(Free(a), m.word, m.mark, Free(a)))
    return v.enclosure
