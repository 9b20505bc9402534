"""Finite words, tails and marked bi-infinite sequences.

Words are tuples of ints in 1..9.  Left tails are always stored read outward,
i.e. the first digit of a left tail is the one adjacent to the middle word.

Text grammar (whitespace ignored)::

    sequence := ['<' word '>'] word? ['<' word '>']

with exactly one ``*`` placed right after the marked digit.  A lone ``<w>``
holding the ``*`` is a purely periodic sequence.  A side without brackets is a
free tail over the alphabet.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

Word = tuple[int, ...]

DEFAULT_ALPHABET = 4
MAX_ALPHABET = 9


class WordSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


def as_word(w: Union[str, Iterable[int]]) -> Word:
    if isinstance(w, str):
        return tuple(int(c) for c in w if not c.isspace())
    return tuple(int(c) for c in w)


def word_str(w: Sequence[int]) -> str:
    return "".join(map(str, w))


def transpose_word(w: Sequence[int]) -> Word:
    return tuple(reversed(w))


def is_palindrome(w: Sequence[int]) -> bool:
    return tuple(w) == tuple(reversed(w))


def is_semi_symmetric(w: Sequence[int]) -> bool:
    """True iff w is a palindrome or a product of two palindromes."""
    w = tuple(w)
    return any(is_palindrome(w[:i]) and is_palindrome(w[i:]) for i in range(len(w) + 1))


def minimal_period(w: Sequence[int]) -> Word:
    w = tuple(w)
    n = len(w)
    for p in range(1, n + 1):
        if n % p == 0 and w[:p] * (n // p) == w:
            return w[:p]
    return w


def rotate(w: Sequence[int], k: int) -> Word:
    w = tuple(w)
    if not w:
        return w
    k %= len(w)
    return w[k:] + w[:k]


def least_rotation(w: Sequence[int]) -> Word:
    w = tuple(w)
    return min((rotate(w, k) for k in range(len(w))), default=w)


def is_factor(u: Sequence[int], w: Sequence[int]) -> bool:
    u, w = tuple(u), tuple(w)
    n = len(u)
    return any(w[i:i + n] == u for i in range(len(w) - n + 1))


# ---------------------------------------------------------------- tails


@dataclass(frozen=True)
class Periodic:
    period: Word

    def __post_init__(self):
        if not self.period:
            raise ValueError("empty period")
        object.__setattr__(self, "period", minimal_period(as_word(self.period)))

    def digit(self, i: int) -> int:
        return self.period[i % len(self.period)]

    def drop(self, k: int) -> "Periodic":
        return Periodic(rotate(self.period, k))

    def push(self, d: int) -> "Tail":
        if self.period[-1] == d:
            return Periodic(rotate(self.period, -1))
        return Finite((d,), None, self)


@dataclass(frozen=True)
class Free:
    alphabet: int

    def __post_init__(self):
        if not 1 <= self.alphabet <= MAX_ALPHABET:
            raise ValueError("alphabet bound must be in 1..9")

    def push(self, d: int) -> "Tail":
        return Finite((d,), self.alphabet)


@dataclass(frozen=True)
class Finite:
    """Known digits followed by a free tail (or, internally, a periodic one)."""

    word: Word
    alphabet: int | None = None
    then: Periodic | None = None

    def push(self, d: int) -> "Tail":
        return Finite((d,) + self.word, self.alphabet, self.then)


Tail = Union[Periodic, Free, Finite]


def tail_digits(t: Tail, n: int) -> Word | None:
    """First n digits of a tail, or None if some are free."""
    if isinstance(t, Periodic):
        return tuple(t.digit(i) for i in range(n))
    if isinstance(t, Finite):
        if n <= len(t.word):
            return t.word[:n]
        if t.then is not None:
            rest = tail_digits(t.then, n - len(t.word))
            return None if rest is None else t.word + rest
        return None
    return None


def tail_drop(t: Tail, k: int) -> Tail:
    if k <= 0:
        return t
    if isinstance(t, Periodic):
        return t.drop(k)
    if isinstance(t, Free):
        return t
    if k < len(t.word):
        return Finite(t.word[k:], t.alphabet, t.then)
    rest = t.then if t.then is not None else Free(t.alphabet or DEFAULT_ALPHABET)
    return tail_drop(rest, k - len(t.word))


def split_tail(t: Tail) -> tuple[Word, Word | None, int | None]:
    """Return (known prefix, period or None, free alphabet or None)."""
    if isinstance(t, Periodic):
        return (), t.period, None
    if isinstance(t, Free):
        return (), None, t.alphabet
    if t.then is not None:
        return t.word, t.then.period, None
    return t.word, None, t.alphabet or DEFAULT_ALPHABET


# ------------------------------------------------------------- sequences


@dataclass(frozen=True)
class MarkedBiSequence:
    """left (read outward) | middle with mark | right."""

    left: Tail
    middle: Word
    mark: int
    right: Tail

    def __post_init__(self):
        if not 0 <= self.mark < len(self.middle):
            raise ValueError("mark must address the middle word")

    @property
    def marked_digit(self) -> int:
        return self.middle[self.mark]

    @property
    def is_doubly_periodic(self) -> bool:
        return isinstance(self.left, Periodic) and isinstance(self.right, Periodic)

    def shift(self, j: int) -> "MarkedBiSequence":
        """The same sequence with the mark moved by j (sigma^j)."""
        left, mid, right = self.left, self.middle, self.right
        pos = self.mark + j
        while pos >= len(mid):
            digits = tail_digits(right, 1)
            if digits is None:
                raise ValueError("cannot move the mark into a free tail")
            mid, right = mid + digits, tail_drop(right, 1)
        while pos < 0:
            digits = tail_digits(left, 1)
            if digits is None:
                raise ValueError("cannot move the mark into a free tail")
            mid, left = digits + mid, tail_drop(left, 1)
            pos += 1
        return MarkedBiSequence(left, mid, pos, right)

    def transpose(self) -> "MarkedBiSequence":
        n = len(self.middle)
        return MarkedBiSequence(self.right, transpose_word(self.middle), n - 1 - self.mark, self.left)

    def window(self, before: int, after: int) -> Word | None:
        """Digits a_{-before} .. a_{after}, or None if a free digit is hit."""
        left = tail_digits(self.left, max(0, before - self.mark))
        right = tail_digits(self.right, max(0, after - (len(self.middle) - 1 - self.mark)))
        if left is None or right is None:
            return None
        full = transpose_word(left) + self.middle + right
        centre = len(left) + self.mark
        return full[centre - before: centre + after + 1]

    def __str__(self) -> str:
        return format_word(self)


# --------------------------------------------------------------- grammar


def _tail_text(t: Tail, side: str) -> tuple[str, str]:
    """Return (finite digits, bracket part) for a tail as written on the page."""
    prefix, period, _ = split_tail(t)
    if side == "left":
        fin = word_str(transpose_word(prefix))
        per = "" if period is None else f"<{word_str(transpose_word(period))}>"
        return fin, per
    fin = word_str(prefix)
    per = "" if period is None else f"<{word_str(period)}>"
    return fin, per


def format_word(s: MarkedBiSequence) -> str:
    if (
        isinstance(s.left, Periodic)
        and isinstance(s.right, Periodic)
        and s.right.period == s.middle
        and s.left.period == transpose_word(s.middle)
    ):
        mid = word_str(s.middle)
        return f"<{mid[:s.mark + 1]}*{mid[s.mark + 1:]}>"
    lfin, lper = _tail_text(s.left, "left")
    rfin, rper = _tail_text(s.right, "right")
    mid = word_str(s.middle)
    return f"{lper}{lfin}{mid[:s.mark + 1]}*{mid[s.mark + 1:]}{rfin}{rper}"


def parse_word(text: str, alphabet: int = DEFAULT_ALPHABET) -> MarkedBiSequence:
    """Parse the text grammar into a marked bi-infinite sequence."""
    chars = [(i, c) for i, c in enumerate(text) if not c.isspace()]
    groups: list[tuple[str, list[tuple[int, str]]]] = []
    pos = 0
    while pos < len(chars):
        off, c = chars[pos]
        if c == "<":
            end = pos + 1
            while end < len(chars) and chars[end][1] != ">":
                if chars[end][1] == "<":
                    raise WordSyntaxError("nested '<'", chars[end][0])
                end += 1
            if end == len(chars):
                raise WordSyntaxError("unterminated '<'", off)
            groups.append(("per", chars[pos + 1:end]))
            pos = end + 1
        elif c == ">":
            raise WordSyntaxError("unmatched '>'", off)
        else:
            end = pos
            while end < len(chars) and chars[end][1] not in "<>":
                end += 1
            groups.append(("fin", chars[pos:end]))
            pos = end
    kinds = [k for k, _ in groups]
    if kinds not in (["fin"], ["per"], ["per", "fin"], ["fin", "per"], ["per", "fin", "per"], ["per", "per"]):
        where = groups[0][1][0][0] if groups and groups[0][1] else 0
        raise WordSyntaxError("expected [<period>] word [<period>]", where)

    stars = [off for _, g in groups for off, c in g if c == "*"]
    if len(stars) != 1:
        raise WordSyntaxError("exactly one '*' is required", stars[1] if stars else 0)

    def digits(g: list[tuple[int, str]]) -> tuple[Word, int | None]:
        out: list[int] = []
        mark = None
        for off, c in g:
            if c == "*":
                if not out or mark is not None and mark == len(out) - 1:
                    raise WordSyntaxError("'*' must follow a digit", off)
                mark = len(out) - 1
            elif c.isdigit() and c != "0":
                d = int(c)
                if d > alphabet:
                    raise WordSyntaxError(f"digit {d} outside alphabet 1..{alphabet}", off)
                out.append(d)
            else:
                raise WordSyntaxError(f"unexpected character {c!r}", off)
        return tuple(out), mark

    parsed = [(k, *digits(g)) for k, g in groups]
    for (k, w, _), (_, g) in zip(parsed, groups):
        if k == "per" and not w:
            raise WordSyntaxError("empty period", g[0][0] if g else 0)

    if kinds == ["per"]:
        (_, w, mark), = parsed
        return MarkedBiSequence(Periodic(transpose_word(w)), w, mark, Periodic(w))

    left: Tail = Free(alphabet)
    right: Tail = Free(alphabet)
    lw: Word = ()
    rw: Word = ()
    lm = rm = fm = None
    fw: Word = ()
    if kinds[0] == "per":
        _, lw, lm = parsed[0]
        left = Periodic(transpose_word(lw))
    if kinds[-1] == "per":
        _, rw, rm = parsed[-1]
        right = Periodic(rw)
    if "fin" in kinds:
        _, fw, fm = parsed[kinds.index("fin")]
    # a period holding the mark contributes one copy to the middle word
    middle = (lw if lm is not None else ()) + fw + (rw if rm is not None else ())
    if lm is not None:
        mark = lm
    elif fm is not None:
        mark = fm
    else:
        mark = len(fw) + rm  # type: ignore[operator]
    assert mark is not None
    return MarkedBiSequence(left, middle, mark, right)


@dataclass(frozen=True)
class MarkedWord:
    word: Word
    mark: int
    alphabet: int = DEFAULT_ALPHABET

    def __post_init__(self):
        if not 0 <= self.mark < len(self.word):
            raise ValueError("mark out of range")

    @staticmethod
    def parse(text: str, alphabet: int = DEFAULT_ALPHABET) -> "MarkedWord":
        s = parse_word(text, alphabet)
        if not (isinstance(s.left, Free) and isinstance(s.right, Free)):
            raise ValueError(f"{text!r} is not a finite marked word")
        return MarkedWord(s.middle, s.mark, alphabet)

    def as_sequence(self) -> MarkedBiSequence:
        return MarkedBiSequence(Free(self.alphabet), self.word, self.mark, Free(self.alphabet))

    def transpose(self) -> "MarkedWord":
        return MarkedWord(transpose_word(self.word), len(self.word) - 1 - self.mark, self.alphabet)

    def __str__(self) -> str:
        w = word_str(self.word)
        return f"{w[:self.mark + 1]}*{w[self.mark + 1:]}"


def transpose(s):
    """Reverse a word, a marked word, or a marked sequence."""
    if isinstance(s, (MarkedBiSequence, MarkedWord)):
        return s.transpose()
    return transpose_word(s)


@dataclass(frozen=True)
class DoublyPeriodicWord:
    """The sequence (p1)^inf tau (p2)^inf, all written left to right.

    ``mark`` is the index of the marked digit relative to the first digit of
    tau; negative values address the left periodic part.
    """

    p1: Word
    tau: Word
    p2: Word
    mark: int = 0

    def __post_init__(self):
        if not self.p1 or not self.p2:
            raise ValueError("periods must be nonempty")

    @staticmethod
    def from_sequence(s: MarkedBiSequence) -> "DoublyPeriodicWord":
        lp, lper, _ = split_tail(s.left)
        rp, rper, _ = split_tail(s.right)
        if lper is None or rper is None:
            raise ValueError("both tails must be eventually periodic")
        tau = transpose_word(lp) + s.middle + rp
        return DoublyPeriodicWord(transpose_word(lper), tau, rper, len(lp) + s.mark)

    def to_sequence(self, mark: int | None = None) -> MarkedBiSequence:
        mark = self.mark if mark is None else mark
        middle = self.p1 + self.p1 + self.tau + self.p2 + self.p2
        off = 2 * len(self.p1)
        s = MarkedBiSequence(Periodic(transpose_word(self.p1)), middle, off, Periodic(self.p2))
        return s.shift(mark)

    def digit(self, i: int) -> int:
        """Digit at index i relative to the first digit of tau."""
        if i < 0:
            return self.p1[i % len(self.p1)]
        if i < len(self.tau):
            return self.tau[i]
        return self.p2[(i - len(self.tau)) % len(self.p2)]

    def unroll(self, lo: int, hi: int) -> Word:
        return tuple(self.digit(i) for i in range(lo, hi))

    @property
    def is_purely_periodic(self) -> bool:
        return not self.tau and self.p1 == self.p2
