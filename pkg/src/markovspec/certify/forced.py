"""Forced-extension searches over marked central words.

A node is a finite word with a marked position.  It is *excluded* when no
bi-infinite extension avoiding the context set can satisfy the hypotheses:
lambda at the mark outside the value window, some other position already
forcing m too high, or (for gap searches) a position beating the mark.  It is
*accepted* when the caller's predicate holds.  Otherwise it branches on the
next digit to the left or right.  Every bound is an exact quadratic
irrational comparison, so an exclusion is a proof.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

from ..exact import RadicalSum
from ..extension import Engine, Val, as_val, engine_for
from ..subshift import ForbiddenSet, normalize
from ..words import DoublyPeriodicWord, MarkedWord, Word, as_word, transpose_word, word_str


@dataclass
class Hypotheses:
    """Constraints on a sequence b with the marked position at the mark.

    lam_above: lambda_mark > value (strict) or >= (if lam_above_closed).
    lam_below: lambda_mark < value.
    m_below:   m(b) < value, so every position's lambda is below it.
    sup_at_mark: m(b) = lambda_mark.
    """

    lam_above: Val | None = None
    lam_above_closed: bool = False
    lam_below: Val | None = None
    m_below: Val | None = None
    sup_at_mark: bool = False


@dataclass
class Node:
    word: Word
    mark: int

    def __str__(self) -> str:
        return str(MarkedWord(self.word, self.mark, max(self.word)))


@dataclass
class SearchResult:
    closed: bool
    accepted: list[Node] = field(default_factory=list)
    frontier: list[Node] = field(default_factory=list)
    nodes: int = 0
    max_len: int = 0
    reasons: dict[str, int] = field(default_factory=dict)
    tree: list[tuple[Node, str]] = field(default_factory=list)


def exclusion(eng: Engine, node: Node, hyp: Hypotheses) -> str | None:
    """Why no admissible extension of node satisfies hyp, or None."""
    w, j = node.word, node.mark
    st = eng.states(w)
    if st is None:
        return "forbidden"
    lo0 = hi0 = None
    if hyp.lam_above is not None:
        hi0 = eng.lam(w, j, st, upper=True)
        c = hi0.cmp(hyp.lam_above)
        if c < 0 or (c == 0 and not hyp.lam_above_closed):
            return "below-window"
    if hyp.lam_below is not None:
        lo0 = eng.lam(w, j, st)
        if lo0 >= hyp.lam_below:
            return "above-window"
    if hyp.m_below is not None or hyp.sup_at_mark:
        if hyp.sup_at_mark and hi0 is None:
            hi0 = eng.lam(w, j, st, upper=True)
        for i in range(len(w)):
            if i == j:
                continue
            v = eng.lam(w, i, st)
            if hyp.m_below is not None and v >= hyp.m_below:
                return "m-too-large"
            if hyp.sup_at_mark and v > hi0:
                return "sup-elsewhere"
    return None


def side_widths(eng: Engine, node: Node) -> tuple[int, int]:
    """Widths of the left and right contributions to lambda at the mark."""
    w, j = node.word, node.mark
    st = eng.states(w)
    r_lo = eng.side(w[j + 1:], st[0], least=True)
    r_hi = eng.side(w[j + 1:], st[0], least=False)
    l_lo = eng.side(transpose_word(w[:j]), st[1], least=True)
    l_hi = eng.side(transpose_word(w[:j]), st[1], least=False)
    return abs(l_hi.hi - l_lo.lo), abs(r_hi.hi - r_lo.lo)


def forced_search(roots: Iterable[Node], context: ForbiddenSet, hyp: Hypotheses,
                  accept: Callable[[Node], bool], max_len: int = 120, node_cap: int = 200_000,
                  choose: Callable[[Engine, Node], str] | None = None,
                  record: bool = False) -> SearchResult:
    """Depth-first exhaustion of central words.

    Nodes that are neither excluded nor accepted and have reached max_len
    are left on the frontier; the search is closed when the frontier is empty.
    """
    eng = engine_for(normalize(context))
    res = SearchResult(closed=False)
    stack = list(roots)[::-1]
    A = context.alphabet
    while stack:
        node = stack.pop()
        res.nodes += 1
        res.max_len = max(res.max_len, len(node.word))
        if res.nodes > node_cap:
            res.frontier.append(node)
            res.frontier.extend(stack)
            return res
        why = exclusion(eng, node, hyp)
        if why is not None:
            res.reasons[why] = res.reasons.get(why, 0) + 1
            if record:
                res.tree.append((node, why))
            continue
        if accept(node):
            res.accepted.append(node)
            if record:
                res.tree.append((node, "accepted"))
            continue
        if len(node.word) >= max_len:
            res.frontier.append(node)
            continue
        side = choose(eng, node) if choose else _default_choice(eng, node)
        if record:
            res.tree.append((node, "extend-" + side))
        if side == "right":
            kids = [Node(node.word + (d,), node.mark) for d in range(1, A + 1)]
        else:
            kids = [Node((d,) + node.word, node.mark + 1) for d in range(1, A + 1)]
        stack.extend(reversed(kids))
    res.closed = not res.frontier
    return res


def _default_choice(eng: Engine, node: Node) -> str:
    lw, rw = side_widths(eng, node)
    return "left" if lw > rw else "right"


def forced_extensions(context: MarkedWord, window: tuple | None, forbidden: ForbiddenSet,
                      side: str = "right") -> list[int]:
    """Digits d such that context+d is admissible and lambda at the mark can lie in window.

    window is (lo, hi) with either end None for unbounded, or None for the
    empty window.  The window is open, matching the exclusions of
    :func:`forced_search`.
    """
    if window is None:
        return []
    lo, hi = window
    hyp = Hypotheses(lam_above=None if lo is None else as_val(lo),
                     lam_below=None if hi is None else as_val(hi))
    eng = engine_for(normalize(forbidden))
    out = []
    for d in range(1, forbidden.alphabet + 1):
        if side == "right":
            node = Node(context.word + (d,), context.mark)
        else:
            node = Node((d,) + context.word, context.mark + 1)
        if exclusion(eng, node, hyp) is None:
            out.append(d)
    return out


def completion_witness(eng: Engine, node: Node, upper: bool = False) -> DoublyPeriodicWord:
    st = eng.states(node.word)
    return eng.lam_witness(node.word, node.mark, st, upper=upper)


@dataclass
class Justification:
    """Why every sequence containing word has m >= the threshold.

    how is "inadmissible" (no extension avoids the earlier words), "bound"
    (the least lambda at position reaches it) or "min" (extremal minimization
    among sequences containing the word; value holds the exact minimum).
    """

    word: Word
    how: str
    position: int | None = None
    value: RadicalSum | None = None


@dataclass
class JustifiedWords:
    threshold: Val
    alphabet: int
    justified: list[Justification] = field(default_factory=list)
    unjustified: list[Word] = field(default_factory=list)

    def forbidden(self, extra=()) -> ForbiddenSet:
        return ForbiddenSet.of([j.word for j in self.justified] + list(extra), self.alphabet)


def justify_words(words, threshold: Val, alphabet: int, use_min: bool = False,
                  node_cap: int = 100_000) -> JustifiedWords:
    """Justify words as forcing m >= threshold, each using the words justified before it.

    Sound by induction on the order: a sequence with m below threshold avoids
    every word justified so far, so later bounds may assume it.  Local bounds
    are tried first; with use_min, a word left over is justified when the
    minimum Markov value over sequences containing it reaches threshold.
    """
    from .extremal import Direction, extremal_markov

    out = JustifiedWords(threshold, alphabet)
    pending = sorted({as_word(w) for w in words}, key=lambda w: (len(w), w))
    tried_min: set[Word] = set()
    while pending:
        eng = engine_for(normalize(out.forbidden()))
        rest = []
        for w in pending:
            st = eng.states(w)
            if st is None:
                out.justified.append(Justification(w, "inadmissible"))
                continue
            pos = next((j for j in range(len(w)) if eng.lam(w, j, st) >= threshold), None)
            if pos is None:
                rest.append(w)
            else:
                out.justified.append(Justification(w, "bound", pos))
        if len(rest) < len(pending):
            pending = rest
            continue
        pending = rest
        # no local progress: minimize for the first word not yet tried in this context
        cand = next((w for w in pending if (w, len(out.justified)) not in tried_min), None) if use_min else None
        if cand is None:
            break
        tried_min.add((cand, len(out.justified)))
        r = extremal_markov(out.forbidden(), Direction.MIN, required=cand, node_cap=node_cap)
        if r.exact is not None and not r.partial and Val.of(r.exact) >= threshold:
            out.justified.append(Justification(cand, "min", value=r.exact))
            pending.remove(cand)
    out.unjustified = pending
    return out


WINDOW_REASONS = ("forbidden", "below-window", "above-window")


def replay(tree: list[tuple[Node, str]], context: ForbiddenSet, hyp: Hypotheses,
           accept: Callable[[Node], bool]) -> list[str]:
    """Re-derive every recorded verdict of a search tree; returns the discrepancies.

    Each extended node must have all its children recorded, and the children
    not excluded by the window or the context must be exactly the digits
    returned by :func:`forced_extensions`.
    """
    eng = engine_for(normalize(context))
    seen = {(n.word, n.mark): v for n, v in tree}
    A = context.alphabet
    window = (hyp.lam_above, hyp.lam_below)
    bad = []
    for node, verdict in tree:
        why = exclusion(eng, node, hyp)
        if verdict.startswith("extend-") or verdict == "accepted":
            if why is not None:
                bad.append(f"{node}: recorded {verdict} but excluded ({why})")
                continue
            if (verdict == "accepted") != accept(node):
                bad.append(f"{node}: acceptance differs from record")
                continue
            if verdict == "accepted":
                continue
            side = verdict[len("extend-"):]
            if side == "right":
                kids = [((node.word + (d,), node.mark), d) for d in range(1, A + 1)]
            else:
                kids = [(((d,) + node.word, node.mark + 1), d) for d in range(1, A + 1)]
            if any(k not in seen for k, _ in kids):
                bad.append(f"{node}: children missing from the tree")
                continue
            alive = [d for k, d in kids if seen[k] not in WINDOW_REASONS]
            ctx = MarkedWord(node.word, node.mark, A)
            if alive != forced_extensions(ctx, window, context, side):
                bad.append(f"{node}: forced extensions differ from recorded children")
        elif why != verdict:
            bad.append(f"{node}: recorded {verdict}, recomputed {why}")
    return bad


__all__ = ["Hypotheses", "Node", "SearchResult", "exclusion", "forced_extensions", "forced_search",
           "completion_witness", "replay", "Justification", "JustifiedWords",
           "justify_words"]
