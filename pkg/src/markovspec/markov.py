"""Markov values of doubly periodic sequences (p1)^inf tau (p2)^inf."""

from __future__ import annotations

from dataclasses import replace

from .cf import SpectrumValue, eval_eventually_periodic
from .exact import RadicalSum
from .words import (
    DoublyPeriodicWord,
    MarkedBiSequence,
    Word,
    minimal_period,
    parse_word,
    rotate,
    transpose_word,
)


def simplify_dp(w: DoublyPeriodicWord) -> DoublyPeriodicWord:
    """Rewrite w in simplest terms without changing the digit stream.

    Periods are reduced to minimal length; leading digits of tau that continue
    the left period are absorbed into it (and trailing ones into the right
    period); with tau empty and distinct periods, the boundary moves right
    until the periods start with different digits.
    """
    p1, tau, p2, mark = minimal_period(w.p1), w.tau, minimal_period(w.p2), w.mark
    while tau and tau[0] == p1[0]:
        p1, tau, mark = rotate(p1, 1), tau[1:], mark - 1
    while tau and tau[-1] == p2[-1]:
        p2, tau = rotate(p2, -1), tau[:-1]
    if not tau and p1 != p2:
        # ...p1 p1 | p2 p2... ; moving the boundary right keeps the stream
        for _ in range(len(p1) * len(p2) + 1):
            if p1[0] != p2[0]:
                break
            p1, p2, mark = rotate(p1, 1), rotate(p2, 1), mark - 1
        else:  # pragma: no cover - impossible for distinct minimal periods
            raise AssertionError("periods never separate")
    return DoublyPeriodicWord(p1, tau, p2, mark)


def _lambda_exact(w: DoublyPeriodicWord, i: int) -> RadicalSum:
    """Exact lambda at index i (relative to tau) of a doubly periodic word."""
    n = len(w.tau)
    if i < 0:
        k = i % len(w.p1)
        # i sits in some copy of p1; the copies between it and tau are periodic
        reps = (-i - 1) // len(w.p1)
        right_known = w.p1[k + 1:] + w.p1 * reps + w.tau
        right = eval_eventually_periodic(right_known, w.p2)
        left = eval_eventually_periodic(transpose_word(w.p1[:k]), transpose_word(w.p1))
        digit = w.p1[k]
    elif i < n:
        right = eval_eventually_periodic(w.tau[i + 1:], w.p2)
        left = eval_eventually_periodic(transpose_word(w.tau[:i]), transpose_word(w.p1))
        digit = w.tau[i]
    else:
        k = (i - n) % len(w.p2)
        reps = (i - n) // len(w.p2)
        right = eval_eventually_periodic(w.p2[k + 1:], w.p2)
        left_known = transpose_word(w.tau + w.p2 * reps + w.p2[:k])
        left = eval_eventually_periodic(left_known, transpose_word(w.p1))
        digit = w.p2[k]
    return RadicalSum.of(digit) + right + left


def periodic_markov(period: Word) -> tuple[RadicalSum, int]:
    """Exact m of the purely periodic sequence and an argmax index in period."""
    period = minimal_period(period)
    best, arg = None, 0
    for k in range(len(period)):
        rot = rotate(period, k)
        v = RadicalSum.of(rot[0]) + eval_eventually_periodic(rot[1:], rot) + \
            eval_eventually_periodic((), transpose_word(rot))
        if best is None or v > best:
            best, arg = v, k
    return best, arg


def window_positions(w: DoublyPeriodicWord) -> range:
    """Index range of the p1 p1 tau p2 p2 window (two periods if pure)."""
    if w.is_purely_periodic:
        return range(0, 2 * len(w.p1))
    return range(-2 * len(w.p1), len(w.tau) + 2 * len(w.p2))


def markov_value_dp(w: DoublyPeriodicWord | MarkedBiSequence | str,
                    simplify: bool = True) -> tuple[SpectrumValue, int | None]:
    """Exact Markov value and an argmax position (relative to tau).

    The position is None when the supremum is only reached along a periodic
    tail, i.e. it equals m of p1 or p2 and no window position attains it.
    """
    if isinstance(w, str):
        w = parse_word(w, 9)
    if isinstance(w, MarkedBiSequence):
        w = DoublyPeriodicWord.from_sequence(w)
    shift = 0
    if simplify:
        s = simplify_dp(w)
        # simplification moves the mark with the digits, so this maps indices back
        shift, w = w.mark - s.mark, s
    best: RadicalSum | None = None
    arg: int | None = None
    if w.is_purely_periodic:
        v, k = periodic_markov(w.p1)
        return SpectrumValue.exactly(v), k + shift
    for i in window_positions(w):
        v = _lambda_exact(w, i)
        if best is None or v > best:
            best, arg = v, i
    for p in (w.p1, w.p2):
        v, _ = periodic_markov(p)
        if v > best:
            best, arg = v, None
    return SpectrumValue.exactly(best), None if arg is None else arg + shift


def lambda_dp(w: DoublyPeriodicWord, i: int) -> RadicalSum:
    """Exact lambda_i of a doubly periodic word (i relative to tau)."""
    if w.is_purely_periodic:
        p = w.p1
        i %= len(p)
        rot = rotate(p, i)
        return RadicalSum.of(rot[0]) + eval_eventually_periodic(rot[1:], rot) + \
            eval_eventually_periodic((), transpose_word(rot))
    return _lambda_exact(w, i)


def markov_value(text_or_seq) -> SpectrumValue:
    return markov_value_dp(text_or_seq)[0]
