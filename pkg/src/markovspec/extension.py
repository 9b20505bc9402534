"""Exact bounds on lambda_j over all admissible extensions of a finite word.

For a central word W of a sequence in Sigma(F), the value lambda_j is
a_j + [0; W[j+1:], right tail] + [0; W[:j] reversed, left tail].  Each side is
monotone in its tail, and the extreme tails from a given automaton context are
eventually periodic, so the bounds are exact quadratic irrationals.  When
|W| >= maxLen - 1 the two tails are independent and the bounds are attained;
for shorter words they are still valid (the true range is smaller).

Bounds are carried as :class:`Val`: an integer enclosure scaled by 2**bits
plus a thunk producing the exact value, which is only built when enclosures
cannot decide a comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from .cf import SpectrumValue, eval_eventually_periodic, mobius
from .exact import QuadIrr, RadicalSum
from .subshift import Automaton, EmptySubshiftError, ForbiddenSet
from .words import DoublyPeriodicWord, Word, transpose_word

BITS = 224


class Val:
    """A real number known through a scaled enclosure and an exact thunk."""

    __slots__ = ("lo", "hi", "_thunk", "_exact")

    def __init__(self, lo: int, hi: int, thunk: Callable[[], RadicalSum] | None = None,
                 exact: RadicalSum | None = None):
        self.lo, self.hi = lo, hi
        self._thunk = thunk
        self._exact = exact

    @staticmethod
    def of(x: "RadicalSum | QuadIrr | Fraction | int | SpectrumValue", bits: int = BITS) -> "Val":
        if isinstance(x, SpectrumValue):
            if not x.is_exact:
                raise ValueError("only exact spectrum values convert to Val")
            x = x.lower
        r = RadicalSum.of(x)
        lo, hi = r._scaled_bounds(bits)
        return Val(lo, hi, exact=r)

    def exact(self) -> RadicalSum:
        if self._exact is None:
            self._exact = self._thunk()
        return self._exact

    def __float__(self) -> float:
        return (self.lo + self.hi) / 2 / (1 << BITS)

    def cmp(self, other: "Val") -> int:
        if self.lo > other.hi:
            return 1
        if self.hi < other.lo:
            return -1
        return (self.exact() - other.exact()).sign()

    def __gt__(self, other: "Val") -> bool:
        return self.cmp(other) > 0

    def __ge__(self, other: "Val") -> bool:
        return self.cmp(other) >= 0

    def __lt__(self, other: "Val") -> bool:
        return self.cmp(other) < 0

    def __le__(self, other: "Val") -> bool:
        return self.cmp(other) <= 0

    def __repr__(self) -> str:
        return f"Val({float(self):.20g})"


def vmax(vals) -> Val:
    best = None
    for v in vals:
        if best is None or v > best:
            best = v
    return best


def _mob_floor(m: tuple[int, int, int, int], t: int, bits: int) -> int:
    p, pp, q, qq = m
    return (((p << bits) + pp * t) << bits) // ((q << bits) + qq * t)


def _mob_ceil(m: tuple[int, int, int, int], t: int, bits: int) -> int:
    p, pp, q, qq = m
    return -((-(((p << bits) + pp * t) << bits)) // ((q << bits) + qq * t))


def mob_enclosure(m: tuple[int, int, int, int], lo: int, hi: int, bits: int) -> tuple[int, int]:
    a, b = _mob_floor(m, lo, bits), _mob_floor(m, hi, bits)
    c, d = _mob_ceil(m, lo, bits), _mob_ceil(m, hi, bits)
    return min(a, b), max(c, d)


@dataclass(frozen=True)
class Tail:
    prefix: Word
    period: Word
    value: QuadIrr
    lo: int
    hi: int

    @property
    def digits(self) -> tuple[Word, Word]:
        return self.prefix, self.period


@dataclass(frozen=True)
class Side:
    """[0; known, tail] at an extreme tail."""

    known: Word
    tail: Tail
    lo: int
    hi: int

    def exact(self) -> QuadIrr:
        return self.tail.value.mobius(*mobius(self.known))


class Engine:
    """Extremal tails and lambda bounds for one forbidden set."""

    def __init__(self, forbidden: ForbiddenSet, bits: int = BITS):
        self.forbidden = forbidden
        self.alphabet = forbidden.alphabet
        self.bits = bits
        self.aut = Automaton(forbidden)
        self._tails: dict[tuple[int, bool], Tail] = {}

    # -- tails -------------------------------------------------------
    def tail(self, state: int, maximize: bool) -> Tail:
        key = (state, maximize)
        t = self._tails.get(key)
        if t is None:
            prefix, period = self.aut.extremal(state, maximize)
            value = eval_eventually_periodic(prefix, period)
            lo, hi = RadicalSum.of(value)._scaled_bounds(self.bits)
            t = Tail(prefix, period, value, lo, hi)
            self._tails[key] = t
        return t

    def states(self, word: Word) -> tuple[int, int] | None:
        """Right and left contexts of word, or None if it has no two-sided extension."""
        r = self.aut.run(word)
        if r < 0 or r not in self.aut.live:
            return None
        l = self.aut.run(reversed(word))
        if l < 0 or l not in self.aut.live:
            return None
        return r, l

    def admissible(self, word: Word) -> bool:
        return self.states(word) is not None

    def side(self, known: Word, state: int, least: bool) -> Side:
        """Extreme of [0; known, tail] over admissible tails after context state."""
        increasing = len(known) % 2 == 0
        t = self.tail(state, maximize=(increasing != least))
        m = mobius(known)
        lo, hi = mob_enclosure(m, t.lo, t.hi, self.bits)
        return Side(known, t, lo, hi)

    # -- lambda ------------------------------------------------------
    def lam(self, word: Word, j: int, st: tuple[int, int], upper: bool = False) -> Val:
        """Min (or max) of lambda_j over admissible extensions of word."""
        right = self.side(word[j + 1:], st[0], least=not upper)
        left = self.side(transpose_word(word[:j]), st[1], least=not upper)
        a = word[j]
        base = a << self.bits

        def thunk() -> RadicalSum:
            return RadicalSum.of(a) + right.exact() + left.exact()

        return Val(base + right.lo + left.lo, base + right.hi + left.hi, thunk)

    def lam_witness(self, word: Word, j: int, st: tuple[int, int], upper: bool = False) -> DoublyPeriodicWord:
        """The extension realizing lam(word, j) as a doubly periodic word marked at j."""
        right = self.side(word[j + 1:], st[0], least=not upper)
        left = self.side(transpose_word(word[:j]), st[1], least=not upper)
        return completion(word, j, left.tail, right.tail)

    def lower_bound(self, word: Word, st: tuple[int, int] | None = None,
                    positions=None) -> tuple[Val, int]:
        """max_j of the minimal lambda_j, with its position.

        Near ties are not resolved exactly: the result may fall short of the
        true maximum by a rounding unit, which keeps it a valid lower bound.
        """
        st = st or self.states(word)
        if st is None:
            raise EmptySubshiftError("word has no admissible extension")
        best, arg = None, -1
        for j in positions if positions is not None else range(len(word)):
            v = self.lam(word, j, st)
            if best is None or v.lo > best.hi:
                best, arg = v, j
        return best, arg

    def reaches(self, word: Word, st: tuple[int, int], threshold: Val) -> bool:
        """Whether some position has least lambda_j >= threshold."""
        return any(self.lam(word, j, st) >= threshold for j in range(len(word)))


def completion(word: Word, mark: int, left: Tail, right: Tail) -> DoublyPeriodicWord:
    """Doubly periodic word: left tail (read outward), word, right tail."""
    tau = transpose_word(left.prefix) + word + right.prefix
    return DoublyPeriodicWord(transpose_word(left.period), tau, right.period,
                              len(left.prefix) + mark)


@lru_cache(maxsize=256)
def engine_for(forbidden: ForbiddenSet) -> Engine:
    return Engine(forbidden)


def as_val(x, bits: int = BITS) -> Val:
    if isinstance(x, Val):
        return x
    if isinstance(x, str):
        x = Fraction(x)
    return Val.of(x, bits)
