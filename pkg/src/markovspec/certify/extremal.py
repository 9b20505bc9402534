"""Extremal Markov values over subshifts of finite type.

Max: sup m = sup lambda_0 by shift invariance.  Fixing a0 together with the
next maxLen-2 digits decouples the two tails, and the extreme tails from an
automaton context are eventually periodic, so the supremum is attained by a
doubly periodic sequence and found by a finite search.

Min (optionally among sequences containing a required word): best-first
branch and bound over central words.  A node's lower bound combines
 * max_j of the least lambda_j over admissible extensions, and
 * the symmetric pair bound: if W = .. a theta a .. with theta a palindrome,
   x1 = [0; digits right of the second a], x2 = [0; digits left of the first a
   read outward] and h(x) = [0; theta, a + x], then
   lambda at the two a's is a + h(x1) + x2 and a + x1 + h(x2), so their max is
   at least a + min(x1, x2) + h(min(x1, x2)), which is increasing in min(x1, x2).
Words G whose lower bound already reaches the incumbent are added to the
forbidden set: a sequence that could still beat the incumbent avoids them.
A node closes when an explicit completion has Markov value equal to the node's
lower bound; the search ends when the smallest open bound reaches the
incumbent.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

from ..cf import SpectrumValue, mobius
from ..exact import QuadIrr, RadicalSum, RatInterval
from ..extension import BITS, Engine, Side, Val, mob_enclosure
from ..markov import markov_value_dp
from ..subshift import EmptySubshiftError, ForbiddenSet, Subshift, avoids, avoids_sequence, normalize
from ..words import DoublyPeriodicWord, Word, as_word, is_factor, is_palindrome, transpose_word

DEFAULT_NODE_CAP = 200_000


class Direction(Enum):
    MAX = "max"
    MIN = "min"


@dataclass
class ExtremalResult:
    value: SpectrumValue | None
    enclosure: RatInterval
    witness: DoublyPeriodicWord | None
    partial: bool = False
    nodes: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def exact(self) -> RadicalSum | None:
        return self.value.lower if self.value is not None and self.value.is_exact else None


def _forbidden(s: Subshift | ForbiddenSet) -> ForbiddenSet:
    return s.forbidden if isinstance(s, Subshift) else s


def markov_of(w: DoublyPeriodicWord) -> RadicalSum:
    return markov_value_dp(w)[0].lower


def extremal_markov(s: Subshift | ForbiddenSet, direction: Direction | str = Direction.MAX,
                    required: str | Word | None = None, node_cap: int = DEFAULT_NODE_CAP,
                    gwords_len: int | None = None) -> ExtremalResult:
    f = _forbidden(s)
    direction = Direction(direction) if isinstance(direction, str) else direction
    if direction is Direction.MAX:
        if required is not None:
            raise ValueError("a required word is only supported for minimization")
        return _maximize(f, node_cap)
    req = as_word(required) if required is not None else None
    return _minimize(f, req, node_cap, gwords_len)


# ------------------------------------------------------------------ max


def _maximize(f: ForbiddenSet, node_cap: int) -> ExtremalResult:
    eng = Engine(f)
    if not eng.aut.live:
        raise EmptySubshiftError("the subshift is empty")
    k = max(f.max_len - 1, 1)
    best: Val | None = None
    best_word: Word | None = None
    nodes = 0
    stack: list[Word] = [(d,) for d in range(f.alphabet, 0, -1)]
    while stack:
        w = stack.pop()
        st = eng.states(w)
        if st is None:
            continue
        nodes += 1
        if nodes > node_cap:
            break
        ub = eng.lam(w, 0, st, upper=True)
        if best is not None and ub <= best:
            continue
        if len(w) >= k:
            best, best_word = ub, w
            continue
        stack.extend(w + (d,) for d in range(1, f.alphabet + 1))
    if best is None:
        raise EmptySubshiftError("the subshift is empty")
    st = eng.states(best_word)
    witness = eng.lam_witness(best_word, 0, st, upper=True)
    value = best.exact()
    m = markov_of(witness)
    if m != value:  # pragma: no cover - would contradict shift invariance
        raise AssertionError("extremal witness does not attain the supremum at its mark")
    partial = nodes > node_cap
    return ExtremalResult(SpectrumValue.exactly(value), value.enclosure(BITS), witness,
                          partial=partial, nodes=nodes)


# ------------------------------------------------------------------ min


def _pairs_through(word: Word, j: int) -> Iterator[tuple[int, int]]:
    a = word[j]
    for k in range(len(word)):
        if k != j and word[k] == a:
            c1, c2 = min(j, k), max(j, k)
            if is_palindrome(word[c1 + 1:c2]):
                yield c1, c2


def pair_bounds(eng: Engine, word: Word, st: tuple[int, int],
                through: int | None = None) -> Iterator[tuple[Val, int, int, bool]]:
    """Symmetric pair lower bounds (value, c1, c2, right side is smaller).

    With ``through`` only pairs containing that position are produced; any
    subset of pairs gives a valid bound.
    """
    n = len(word)
    if through is None:
        pairs = ((c1, c2) for c1 in range(n) for c2 in range(c1 + 1, n)
                 if word[c1] == word[c2] and is_palindrome(word[c1 + 1:c2]))
    else:
        pairs = _pairs_through(word, through)
    for c1, c2 in pairs:
        a = word[c1]
        if True:
            x1 = eng.side(word[c2 + 1:], st[0], least=True)
            x2 = eng.side(transpose_word(word[:c1]), st[1], least=True)
            right_small = _side_cmp(x1, x2) <= 0
            t = x1 if right_small else x2
            h = mobius(word[c1 + 1:c2] + (a,))
            hlo, hhi = mob_enclosure(h, t.lo, t.hi, eng.bits)
            base = a << eng.bits

            def thunk(t=t, h=h, a=a) -> RadicalSum:
                te = t.exact()
                return RadicalSum.of(a) + te + te.mobius(*h)

            yield Val(base + t.lo + hlo, base + t.hi + hhi, thunk), c1, c2, right_small


def _side_cmp(x: Side, y: Side) -> int:
    if x.lo > y.hi:
        return 1
    if x.hi < y.lo:
        return -1
    return (RadicalSum.of(x.exact()) - RadicalSum.of(y.exact())).sign()


def _unroll_side(side: Side, n: int) -> Word:
    digits = list(side.known + side.tail.prefix)
    while len(digits) < n:
        digits.extend(side.tail.period)
    return tuple(digits[:n])


def _symmetric_witness(eng: Engine, word: Word, st: tuple[int, int], c1: int, c2: int,
                       right_small: bool) -> DoublyPeriodicWord | None:
    """Mirror the smaller side around a theta a; None if inconsistent with word."""
    if right_small:
        side = eng.side(word[c2 + 1:], st[0], least=True)
        other = transpose_word(word[:c1])
    else:
        side = eng.side(transpose_word(word[:c1]), st[1], least=True)
        other = word[c2 + 1:]
    if _unroll_side(side, len(other)) != other:
        return None
    outer = side.known + side.tail.prefix
    core = word[c1:c2 + 1]
    tau = transpose_word(outer) + core + outer
    return DoublyPeriodicWord(transpose_word(side.tail.period), tau, side.tail.period,
                              len(outer))


def _periodic_completions(word: Word, max_period: int = 12) -> Iterator[DoublyPeriodicWord]:
    """Continue both ends of word periodically with short periods."""
    n = len(word)
    for p in range(1, min(max_period, n) + 1):
        for q in range(1, min(max_period, n) + 1):
            yield DoublyPeriodicWord(word[:p], word, word[n - q:], 0)


def _contains(w: DoublyPeriodicWord, req: Word | None) -> bool:
    if req is None:
        return True
    span = w.unroll(-2 * len(w.p1) - len(req), len(w.tau) + 2 * len(w.p2) + len(req))
    return is_factor(req, span) or is_factor(transpose_word(req), span)


class _MinSearch:
    def __init__(self, f: ForbiddenSet, req: Word | None, node_cap: int, glen: int | None):
        self.f = f
        self.req = req
        self.node_cap = node_cap
        self.glen = glen or {1: 1, 2: 12, 3: 8, 4: 6}.get(f.alphabet, 5)
        self.base = Engine(f)
        self.eng = self.base
        self.best: Val | None = None
        self.witness: DoublyPeriodicWord | None = None
        self.g_for: Val | None = None
        self.nodes = 0
        self._seen: dict = {}
        self.version = 0
        self.static_g: set[Word] = set()
        self.learned: set[Word] = set()

    # incumbent ---------------------------------------------------------
    def offer(self, w: DoublyPeriodicWord | None) -> Val | None:
        """Markov value of a candidate completion, updating the incumbent."""
        if w is None or not _contains(w, self.req):
            return None
        key = (w.p1, w.tau, w.p2)
        if key in self._seen:
            return self._seen[key]
        m = None
        if avoids_sequence(w.p1, w.tau, w.p2, self.f):
            m = Val.of(markov_of(w))
            if self.best is None or m < self.best:
                self.best, self.witness = m, w
        self._seen[key] = m
        return m

    def refresh_g(self) -> None:
        """Forbid short words whose lower bound reaches the incumbent."""
        if self.best is None or (self.g_for is not None and self.g_for <= self.best):
            return
        g: set[Word] = set()
        stack: list[Word] = [(d,) for d in range(1, self.f.alphabet + 1)]
        while stack:
            w = stack.pop()
            st = self.base.states(w)
            # proper prefixes were already checked, so only suffixes can be in g
            if st is None or any(w[i:] in g for i in range(1, len(w))):
                continue
            if self.base.reaches(w, st, self.best):
                g.add(w)
                continue
            if len(w) < self.glen:
                stack.extend(w + (d,) for d in range(1, self.f.alphabet + 1))
        self.g_for = self.best
        self.static_g = g
        self._rebuild()

    def _rebuild(self) -> None:
        words = self.f.words | frozenset(self.static_g) | frozenset(self.learned)
        if words != self.eng.forbidden.words:
            self.eng = Engine(normalize(ForbiddenSet(words, self.f.alphabet)))
            self.version += 1

    def learn(self, child: Word, right: bool) -> bool:
        """Record the shortest end of a pruned child that already reaches the incumbent."""
        for k in range(1, len(child) + 1):
            u = child[-k:] if right else child[:k]
            st = self.eng.states(u)
            if st is None:
                return False
            if self.eng.reaches(u, st, self.best):
                self.learned.add(u)
                return True
        return False

    # nodes -------------------------------------------------------------
    def evaluate(self, word: Word):
        eng = self.eng
        st = eng.states(word)
        if st is None:
            return None
        lb, arg = eng.lower_bound(word, st)
        pair = None
        for v, c1, c2, rs in pair_bounds(eng, word, st, through=arg):
            if v.lo > lb.hi:
                lb, pair = v, (c1, c2, rs)
        return lb, arg, pair, st, self.version

    def try_close(self, word: Word, lb: Val, arg: int, pair, st) -> bool:
        eng = self.eng
        cands = [eng.lam_witness(word, arg, st)]
        if pair is not None:
            cands.append(_symmetric_witness(eng, word, st, *pair))
        window = len(word) + 2 * self.f.max_len + 2
        for w in _periodic_completions(word):
            if eng.admissible(w.unroll(-window, len(w.tau) + window)):
                cands.append(w)
        closed = False
        for w in cands:
            m = self.offer(w)
            if m is not None and m.cmp(lb) == 0:
                closed = True
        return closed

    def run(self, roots: list[Word]) -> ExtremalResult:
        heap: list = []
        counter = itertools.count()
        for r in roots:
            ev = self.evaluate(r)
            if ev is not None:
                self.try_close(r, *ev[:4])
        self.refresh_g()
        for r in roots:
            ev = self.evaluate(r)
            if ev is not None:
                heapq.heappush(heap, (float(ev[0]), next(counter), r, ev))
        partial = False
        while heap:
            _, _, word, ev = heapq.heappop(heap)
            lb, arg, pair, st, version = ev
            if self.best is not None and lb >= self.best:
                break
            if version != self.version:
                # bounds from a smaller G are valid but weak; redo them
                ev = self.evaluate(word)
                if ev is not None and (self.best is None or ev[0] < self.best):
                    heapq.heappush(heap, (float(ev[0]), next(counter), word, ev))
                continue
            self.nodes += 1
            if self.nodes > self.node_cap:
                heapq.heappush(heap, (float(lb), next(counter), word, ev))
                partial = True
                break
            before = self.best
            if self.try_close(word, lb, arg, pair, st):
                break
            if self.best is not before:
                self.refresh_g()
                if self.version != version:
                    heapq.heappush(heap, (float(lb), next(counter), word, ev))
                    continue
            right = len(word) - 1 - arg <= arg
            learned = False
            for d in range(1, self.f.alphabet + 1):
                child = word + (d,) if right else (d,) + word
                cev = self.evaluate(child)
                if cev is None:
                    continue
                if self.best is not None and cev[0] >= self.best:
                    learned |= self.learn(child, right)
                    continue
                heapq.heappush(heap, (float(cev[0]), next(counter), child, cev))
            if learned:
                self._rebuild()
        if self.best is None:
            raise EmptySubshiftError("no admissible sequence contains the required word")
        value = self.best.exact()
        if partial:
            low = min(e[3][0] for e in heap)
            lo = low.exact().enclosure(BITS).lo
            enc = RatInterval(min(lo, value.enclosure(BITS).lo), value.enclosure(BITS).hi)
            return ExtremalResult(None, enc, self.witness, partial=True, nodes=self.nodes,
                                  notes=["node cap reached"])
        return ExtremalResult(SpectrumValue.exactly(value), value.enclosure(BITS), self.witness,
                              nodes=self.nodes)


def _minimize(f: ForbiddenSet, req: Word | None, node_cap: int, glen: int | None) -> ExtremalResult:
    search = _MinSearch(f, req, node_cap, glen)
    if req is not None:
        if any(not 1 <= d <= f.alphabet for d in req):
            raise ValueError("required word uses digits outside the alphabet")
        roots = [req]
    else:
        roots = [(d,) for d in range(1, f.alphabet + 1)]
    return search.run(roots)
