"""Subshifts of finite type given by forbidden words.

Two presentations are provided.  :func:`block_graph` is the classical higher
block graph on admissible words of length maxLen-1.  :class:`Automaton` is
the compact presentation used for real work: its states are contexts (the
longest suffix of what has been read that is a proper prefix of a forbidden
word).  After reading maxLen-1 digits the context only depends on those
digits, so the essential part of the automaton is a graph quotient of the
essential block graph and both are strongly connected together.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import networkx as nx

from .words import Word, as_word, is_factor, transpose_word, word_str


class EmptySubshiftError(ValueError):
    pass


@dataclass(frozen=True)
class ForbiddenSet:
    words: frozenset[Word]
    alphabet: int

    @staticmethod
    def of(words: Iterable[str | Sequence[int]], alphabet: int, normal: bool = True) -> "ForbiddenSet":
        f = ForbiddenSet(frozenset(as_word(w) for w in words), alphabet)
        return normalize(f) if normal else f

    @property
    def max_len(self) -> int:
        return max((len(w) for w in self.words), default=0)

    def __iter__(self) -> Iterator[Word]:
        return iter(sorted(self.words, key=lambda w: (len(w), w)))

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, w: object) -> bool:
        return as_word(w) in self.words  # type: ignore[arg-type]

    def union(self, other: Iterable[Sequence[int]]) -> "ForbiddenSet":
        return normalize(ForbiddenSet(self.words | {as_word(w) for w in other}, self.alphabet))

    def without(self, other: Iterable[Sequence[int]]) -> "ForbiddenSet":
        drop = {as_word(w) for w in other}
        drop |= {transpose_word(w) for w in drop}
        return ForbiddenSet(self.words - drop, self.alphabet)

    def __str__(self) -> str:
        return "{" + ", ".join(word_str(w) for w in self) + "}"


def normalize(f: ForbiddenSet) -> ForbiddenSet:
    """Close under transposition and drop words having a forbidden factor."""
    for w in f.words:
        if not w or any(not 1 <= d <= f.alphabet for d in w):
            raise ValueError(f"forbidden word {word_str(w)!r} is not over 1..{f.alphabet}")
    words = set(f.words) | {transpose_word(w) for w in f.words}
    by_len = sorted(words, key=len)
    keep: list[Word] = []
    for w in by_len:
        if not any(is_factor(u, w) for u in keep):
            keep.append(w)
    return ForbiddenSet(frozenset(keep), f.alphabet)


def avoids(w: Sequence[int], f: ForbiddenSet) -> bool:
    w = as_word(w)
    return not any(is_factor(u, w) for u in f.words)


def avoids_periodic(period: Sequence[int], f: ForbiddenSet) -> bool:
    """Whether the periodic sequence with this period avoids f."""
    p = as_word(period)
    reps = f.max_len // len(p) + 2
    return avoids(p * reps, f)


def avoids_sequence(left_period: Sequence[int] | None, middle: Sequence[int],
                    right_period: Sequence[int] | None, f: ForbiddenSet) -> bool:
    """Whether ...(left_period) middle (right_period)... avoids f (written left to right)."""
    n = f.max_len + 1
    lp = as_word(left_period) if left_period else ()
    rp = as_word(right_period) if right_period else ()
    left = lp * (n // max(1, len(lp)) + 2) if lp else ()
    right = rp * (n // max(1, len(rp)) + 2) if rp else ()
    return avoids(left + as_word(middle) + right, f)


@dataclass(frozen=True)
class Subshift:
    forbidden: ForbiddenSet

    @staticmethod
    def of(words: Iterable[str | Sequence[int]], alphabet: int) -> "Subshift":
        return Subshift(ForbiddenSet.of(words, alphabet))

    @property
    def alphabet(self) -> int:
        return self.forbidden.alphabet

    @cached_property
    def automaton(self) -> "Automaton":
        return Automaton(self.forbidden)

    def contains_periodic(self, period: Sequence[int]) -> bool:
        return avoids_periodic(period, self.forbidden)

    def transpose(self) -> "Subshift":
        return self  # forbidden sets are transpose closed


# ------------------------------------------------------------ automaton


class Automaton:
    """Aho-Corasick automaton of a forbidden set, restricted to live states.

    ``step(s, d)`` returns the next context or -1 when a forbidden word is
    completed.  ``live`` holds the contexts from which an infinite admissible
    continuation exists; ``essential`` those lying on a bi-infinite path.
    """

    def __init__(self, forbidden: ForbiddenSet):
        self.forbidden = forbidden
        self.alphabet = forbidden.alphabet
        A = self.alphabet
        children: list[dict[int, int]] = [{}]
        prefix: list[Word] = [()]
        terminal = [False]
        for w in forbidden:
            s = 0
            for d in w:
                nxt = children[s].get(d)
                if nxt is None:
                    nxt = len(children)
                    children[s][d] = nxt
                    children.append({})
                    prefix.append(prefix[s] + (d,))
                    terminal.append(False)
                s = nxt
            terminal[s] = True
        n = len(children)
        fail = [0] * n
        trans = [[0] * A for _ in range(n)]
        dead = terminal[:]
        order = deque()
        for d in range(1, A + 1):
            c = children[0].get(d)
            if c is None:
                trans[0][d - 1] = 0
            else:
                trans[0][d - 1] = c
                fail[c] = 0
                order.append(c)
        while order:
            s = order.popleft()
            dead[s] = dead[s] or dead[fail[s]]
            for d in range(1, A + 1):
                c = children[s].get(d)
                if c is None:
                    trans[s][d - 1] = trans[fail[s]][d - 1]
                else:
                    fail[c] = trans[fail[s]][d - 1]
                    trans[s][d - 1] = c
                    order.append(c)
        self.context = prefix
        self.trans = [tuple(-1 if dead[t] else t for t in row) for row in trans]
        self.dead = dead
        self.size = n
        self.live = self._live_states()
        self.essential = self._essential_states()

    def step(self, s: int, d: int) -> int:
        return self.trans[s][d - 1]

    def run(self, word: Iterable[int], s: int = 0) -> int:
        for d in word:
            if s < 0:
                return -1
            s = self.trans[s][d - 1]
        return s

    def _live_states(self) -> frozenset[int]:
        alive = {s for s in range(self.size) if not self.dead[s]}
        changed = True
        while changed:
            changed = False
            for s in list(alive):
                if not any(t in alive for t in self.trans[s] if t >= 0):
                    alive.discard(s)
                    changed = True
        return frozenset(alive)

    def _essential_states(self) -> frozenset[int]:
        alive = set(self.live)
        changed = True
        while changed:
            changed = False
            has_in = {t for s in alive for t in self.trans[s] if t in alive}
            for s in list(alive):
                if s not in has_in or not any(t in alive for t in self.trans[s] if t >= 0):
                    alive.discard(s)
                    changed = True
        return frozenset(alive)

    def graph(self, states: Iterable[int] | None = None) -> nx.DiGraph:
        keep = set(self.essential if states is None else states)
        g = nx.DiGraph()
        g.add_nodes_from(keep)
        for s in keep:
            for d, t in enumerate(self.trans[s], start=1):
                if t in keep:
                    g.add_edge(s, t, digit=d)
        return g

    def successors(self, s: int, live_only: bool = True) -> list[tuple[int, int]]:
        ok = self.live if live_only else None
        out = []
        for d, t in enumerate(self.trans[s], start=1):
            if t >= 0 and (ok is None or t in ok):
                out.append((d, t))
        return out

    def extremal(self, s: int, maximize: bool) -> tuple[Word, Word]:
        """Greedy extremal continuation from context s.

        Returns (prefix, period) such that [0; prefix, period, period, ...] is
        the max (or min) of [0; b1, b2, ...] over all infinite admissible
        continuations b from s.  A larger value needs a smaller b_k at odd k
        and a larger b_k at even k.
        """
        if s not in self.live:
            raise EmptySubshiftError("no infinite continuation from this context")
        digits: list[int] = []
        seen: dict[tuple[int, int], int] = {}
        k = 0
        while (s, k % 2) not in seen:
            seen[(s, k % 2)] = k
            ascending = (k % 2 == 0) == maximize
            order = range(1, self.alphabet + 1) if ascending else range(self.alphabet, 0, -1)
            for d in order:
                t = self.trans[s][d - 1]
                if t >= 0 and t in self.live:
                    digits.append(d)
                    s = t
                    break
            k += 1
        start = seen[(s, k % 2)]
        return tuple(digits[:start]), tuple(digits[start:])


# ----------------------------------------------------------- block graph


@dataclass
class BlockGraph:
    """Higher block presentation on admissible words of length maxLen-1."""

    graph: nx.DiGraph
    essential: nx.DiGraph
    block_length: int


def block_graph(s: Subshift | ForbiddenSet) -> BlockGraph:
    f = s.forbidden if isinstance(s, Subshift) else s
    k = max(f.max_len - 1, 1)
    A = f.alphabet
    g = nx.DiGraph()
    for u in itertools.product(range(1, A + 1), repeat=k):
        if avoids(u, f):
            g.add_node(u)
    for u in list(g.nodes):
        for d in range(1, A + 1):
            if avoids(u + (d,), f):
                v = u[1:] + (d,)
                if v in g:
                    g.add_edge(u, v, digit=d)
    ess = g.copy()
    changed = True
    while changed:
        drop = [v for v in ess if ess.in_degree(v) == 0 or ess.out_degree(v) == 0]
        changed = bool(drop)
        ess.remove_nodes_from(drop)
    return BlockGraph(g, ess, k)


def _strongly_connected(g: nx.DiGraph) -> bool:
    return g.number_of_nodes() > 0 and g.number_of_edges() > 0 and nx.is_strongly_connected(g)


def is_transitive(s: Subshift | ForbiddenSet, letter: int | None = None,
                  cap: int | None = None) -> tuple[bool, dict[Word, Word | None] | None]:
    """Decide transitivity; optionally list connecting words for each forbidden word.

    The verdict comes from strong connectivity of the essential part of the
    context automaton.  The witness table (only when ``letter`` is given) maps
    each forbidden word w to a shortest tau with w[:-1] tau letter^inf
    admissible, or None when the search cap is exhausted.
    """
    sub = s if isinstance(s, Subshift) else Subshift(s)
    aut = sub.automaton
    if not aut.essential:
        raise EmptySubshiftError("the subshift is empty")
    verdict = _strongly_connected(aut.graph())
    table = connect_witnesses(sub, letter, cap) if letter is not None else None
    return verdict, table


def connect_witnesses(s: Subshift | ForbiddenSet, letter: int,
                      cap: int | None = None) -> dict[Word, Word | None]:
    """Shortest tau_w with w^- tau_w (letter)^inf avoiding the forbidden set."""
    f = s.forbidden if isinstance(s, Subshift) else s
    if not avoids_periodic((letter,), f):
        raise ValueError(f"the constant sequence {letter} is not in the subshift")
    cap = 4 * f.max_len if cap is None else cap
    tail = (letter,) * (f.max_len + 1)
    out: dict[Word, Word | None] = {}
    for w in f:
        base = w[:-1]
        found: Word | None = None
        frontier: list[Word] = [()]
        for length in range(cap + 1):
            for tau in frontier:
                if avoids(base + tau + tail, f):
                    found = tau
                    break
            if found is not None or length == cap:
                break
            frontier = [t + (d,) for t in frontier for d in range(1, f.alphabet + 1)
                        if avoids(base + t + (d,), f)]
            if not frontier:
                break
        out[w] = found
    return out


# ------------------------------------------------------------- Sigma_t


def approx_sigma_t(t: Fraction | int | str, n: int, alphabet: int,
                   minimal: bool = False) -> ForbiddenSet:
    """Words a_1..a_{2n+1} whose centred lambda_0 exceeds t for every extension.

    With ``minimal=True`` a smaller set defining the same subshift is returned:
    centred words of length <= 2n+1 found by growing both sides alternately
    and stopping as soon as every extension exceeds t.
    """
    from .cf import lambda0
    from .words import Free, MarkedBiSequence
    from .exact import RadicalSum

    if n < 1:
        raise ValueError("n must be positive")
    t = Fraction(t)
    free = Free(alphabet)
    found: set[Word] = set()

    def lower(word: Word, mark: int) -> RadicalSum:
        return lambda0(MarkedBiSequence(free, word, mark, free)).lower

    def upper(word: Word, mark: int) -> RadicalSum:
        return lambda0(MarkedBiSequence(free, word, mark, free)).upper

    # grow right first, then left, keeping the mark at the centre
    def grow(word: Word, mark: int) -> None:
        left, right = mark, len(word) - 1 - mark
        lo = lower(word, mark)
        if lo > t:
            if minimal:
                found.add(word)
                return
            if left == n and right == n:
                found.add(word)
                return
        elif left == n and right == n:
            return
        elif upper(word, mark) <= t:
            return
        for d in range(1, alphabet + 1):
            if right <= left:
                grow(word + (d,), mark)
            else:
                grow((d,) + word, mark + 1)

    for d in range(1, alphabet + 1):
        grow((d,), 0)
    if minimal:
        return normalize(ForbiddenSet(frozenset(found), alphabet))
    return ForbiddenSet(frozenset(found), alphabet)


# ---------------------------------------------------------- file format


def parse_fset(text: str, source: str = "<string>") -> ForbiddenSet:
    """Parse a forbidden-set file: ``alphabet: A`` header then one word per line."""
    alphabet = None
    words: list[Word] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("alphabet"):
            try:
                alphabet = int(line.split(":", 1)[1])
            except (IndexError, ValueError):
                raise FormatError(f"{source}:{lineno}: bad alphabet header") from None
            continue
        if not line.isdigit() or "0" in line:
            raise FormatError(f"{source}:{lineno}: not a word over 1..9: {line!r}")
        words.append(as_word(line))
    if alphabet is None:
        raise FormatError(f"{source}: missing 'alphabet: A' header")
    try:
        return ForbiddenSet.of(words, alphabet)
    except ValueError as exc:
        raise FormatError(f"{source}: {exc}") from None


def load_fset(path: str | Path) -> ForbiddenSet:
    p = Path(path)
    return parse_fset(p.read_text(encoding="utf-8"), str(p))


def dump_fset(f: ForbiddenSet) -> str:
    lines = [f"alphabet: {f.alphabet}"]
    lines += [word_str(w) for w in f]
    return "\n".join(lines) + "\n"


class FormatError(ValueError):
    pass
