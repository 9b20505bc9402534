"""Inequalities on lambda_0 and m holding for every extension of a word.

A statement such as ``lam0(2123*1122) > j0 + 1e-4`` asserts that lambda_0 of
every bi-infinite extension of the marked word exceeds the threshold; the
bound used is exact (least or greatest lambda over admissible tails), so a
verdict is never a floating point guess.  ``m(W) > t`` is checked through the
largest least-lambda_j over positions of W, a sufficient condition.

Statements may carry a context forbidden set: extensions are then restricted
to sequences avoiding it.  Ledger files describe the context under which a
group of statements is claimed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping

from ..cf import SpectrumValue, lambda0
from ..exact import RadicalSum, RatInterval
from ..extension import BITS, Val, engine_for
from ..markov import lambda_dp, markov_value_dp
from ..subshift import ForbiddenSet, FormatError, normalize
from ..words import (
    DoublyPeriodicWord,
    Free,
    MarkedBiSequence,
    MarkedWord,
    as_word,
    parse_word,
)

RELATIONS = (">=", "<=", ">", "<")


@dataclass(frozen=True)
class Threshold:
    """base + offset, where base names a value (or is absent)."""

    offset: Fraction
    base: str | None = None

    def resolve(self, names: Mapping[str, RadicalSum]) -> RadicalSum:
        if self.base is None:
            return RadicalSum.of(self.offset)
        if self.base not in names:
            raise KeyError(f"unknown named value {self.base!r}")
        return names[self.base] + self.offset

    def __str__(self) -> str:
        if self.base is None:
            return str(self.offset)
        if not self.offset:
            return self.base
        sign = "+" if self.offset > 0 else "-"
        return f"{self.base} {sign} {abs(self.offset)}"


@dataclass(frozen=True)
class InequalityStatement:
    subject: MarkedWord | MarkedBiSequence
    relation: str
    threshold: Threshold
    quantity: str = "lam0"  # or "m"
    label: str = ""
    context: ForbiddenSet | None = None

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValueError(f"bad relation {self.relation!r}")
        if self.quantity not in ("lam0", "m"):
            raise ValueError(f"bad quantity {self.quantity!r}")
        if self.quantity == "m" and self.relation in ("<", "<="):
            raise ValueError("only lower bounds on m are supported")

    @property
    def lower(self) -> bool:
        """Whether the statement bounds its quantity from below."""
        return self.relation in (">", ">=")

    def negated_threshold(self, delta: Fraction) -> "InequalityStatement":
        """Same statement with the threshold moved by delta (for mutation tests)."""
        t = Threshold(self.threshold.offset + delta, self.threshold.base)
        return InequalityStatement(self.subject, self.relation, t, self.quantity, self.label, self.context)

    def __str__(self) -> str:
        return f"{self.quantity}({self.subject}) {self.relation} {self.threshold}"


@dataclass
class InequalityResult:
    statement: InequalityStatement
    holds: bool
    margin: RatInterval
    context: str = "free"

    def __iter__(self):
        return iter((self.holds, self.margin))


def _interval(v: Val) -> RatInterval:
    return RatInterval(Fraction(v.lo, 1 << BITS), Fraction(v.hi, 1 << BITS))


def _decide(relation: str, bound: Val, t: Val) -> tuple[bool, RatInterval]:
    c = bound.cmp(t)
    ok = {">": c > 0, ">=": c >= 0, "<": c < 0, "<=": c <= 0}[relation]
    diff = _interval(bound) - _interval(t)
    if relation in ("<", "<="):
        diff = RatInterval(-diff.hi, -diff.lo)
    if not ok and diff.lo > 0:
        # enclosures overlapped zero; the exact sign decided against
        diff = RatInterval(min(diff.lo, Fraction(0)), diff.hi)
    return ok, diff


def _bound_word(stmt: InequalityStatement, forbidden: ForbiddenSet) -> Val | None:
    """Least (or greatest) value of the quantity over admissible extensions."""
    w = stmt.subject
    eng = engine_for(normalize(forbidden))
    st = eng.states(w.word)
    if st is None:
        return None
    if stmt.quantity == "lam0":
        return eng.lam(w.word, w.mark, st, upper=not stmt.lower)
    best = None
    for j in range(len(w.word)):
        v = eng.lam(w.word, j, st)
        if best is None or v > best:
            best = v
    return best


def _bound_sequence(stmt: InequalityStatement) -> Val:
    s = stmt.subject
    if s.is_doubly_periodic:
        dp = DoublyPeriodicWord.from_sequence(s)
        if stmt.quantity == "m":
            return Val.of(markov_value_dp(dp)[0])
        return Val.of(lambda_dp(dp, dp.mark))
    if stmt.quantity == "m":
        raise ValueError("m of a sequence with free tails: state it on a word")
    v: SpectrumValue = lambda0(s)
    return Val.of(v.lower if stmt.lower else v.upper)


def verify_inequality(stmt: InequalityStatement, names: Mapping[str, RadicalSum] | None = None,
                      context: ForbiddenSet | None = None) -> InequalityResult:
    """Decide the statement over all extensions (avoiding ``context`` if given).

    Returns holds and the margin: an interval holding the signed distance
    from the bound to the threshold (positive when the statement holds).
    """
    t = Val.of(stmt.threshold.resolve(names or {}))
    if isinstance(stmt.subject, MarkedBiSequence):
        ok, margin = _decide(stmt.relation, _bound_sequence(stmt), t)
        return InequalityResult(stmt, ok, margin, "exact")
    alphabet = stmt.subject.alphabet
    f = context if context is not None else ForbiddenSet.of([], alphabet)
    bound = _bound_word(stmt, f)
    label = "free" if not len(f) else "context"
    if bound is None:
        # no extension avoids the context: vacuously true
        return InequalityResult(stmt, True, RatInterval.point(0), "vacuous")
    ok, margin = _decide(stmt.relation, bound, t)
    return InequalityResult(stmt, ok, margin, label)


@dataclass
class BatchReport:
    results: list[InequalityResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.holds for r in self.results)

    @property
    def failures(self) -> list[InequalityResult]:
        return [r for r in self.results if not r.holds]

    def min_margin(self) -> Fraction | None:
        return min((r.margin.lo for r in self.results), default=None)

    def lines(self) -> list[str]:
        out = []
        for r in self.results:
            verdict = "ok  " if r.holds else "FAIL"
            tag = f"[{r.statement.label}] " if r.statement.label else ""
            out.append(f"{verdict} {tag}{r.statement}  margin>={float(r.margin.lo):.3e} ({r.context})")
        return out


def verify_batch(stmts: Iterable[InequalityStatement], names: Mapping[str, RadicalSum] | None = None,
                 fail_fast: bool = False) -> BatchReport:
    """Verify each statement over free extensions, then under its context.

    The context is only consulted when the free check fails, so the report
    shows which statements needed the forbidden-word hypothesis.
    """
    rep = BatchReport()
    for s in stmts:
        r = verify_inequality(s, names)
        if not r.holds and s.context is not None and isinstance(s.subject, MarkedWord):
            r = verify_inequality(s, names, s.context)
        rep.results.append(r)
        if fail_fast and not r.holds:
            break
    return rep


# -- text form ----------------------------------------------------------

_STMT = re.compile(r"^(lam0|m)\((.+)\)\s*(>=|<=|>|<)\s*(.+)$")
_THRESH = re.compile(r"^([A-Za-z_]\w*)?\s*(?:([+-])\s*([0-9./eE+-]+))?$")


def parse_threshold(text: str) -> Threshold:
    text = text.strip()
    try:
        return Threshold(Fraction(text))
    except ValueError:
        pass
    m = _THRESH.match(text)
    if not m or not m.group(1):
        raise ValueError(f"bad threshold {text!r}")
    off = Fraction(0)
    if m.group(2):
        off = _number(m.group(3))
        if m.group(2) == "-":
            off = -off
    return Threshold(off, m.group(1))


def _number(text: str) -> Fraction:
    # accepts p/q, decimals and 5e-20; a*b forms like 5*1e-20 are written 5e-20
    return Fraction(text)


def expand_macros(text: str, macros: Mapping[str, str]) -> str:
    def sub(m: re.Match) -> str:
        key = m.group(1)
        if key not in macros:
            raise KeyError(f"unknown macro {{{key}}}")
        return macros[key]

    for _ in range(16):
        new = re.sub(r"\{([^{}]+)\}", sub, text)
        if new == text:
            return new
        text = new
    raise ValueError("macro expansion does not terminate")


def parse_statement(text: str, alphabet: int = 3, macros: Mapping[str, str] | None = None,
                    label: str = "", context: ForbiddenSet | None = None) -> InequalityStatement:
    """Parse ``lam0(2123*1122) > j0 + 1e-4`` or ``m(<13>33*1<31>) > 4``."""
    m = _STMT.match(text.strip())
    if not m:
        raise ValueError(f"bad statement {text!r}")
    qty, subj, rel, thr = m.groups()
    subj = expand_macros(subj.strip(), macros or {})
    seq = parse_word(subj, alphabet)
    if isinstance(seq.left, Free) and isinstance(seq.right, Free):
        subject: MarkedWord | MarkedBiSequence = MarkedWord(seq.middle, seq.mark, alphabet)
    else:
        subject = seq
    return InequalityStatement(subject, rel, parse_threshold(thr), qty, label, context)


@dataclass
class Ledger:
    """Statements with the macros, named values and contexts they use."""

    alphabet: int
    macros: dict[str, str]
    names: dict[str, RadicalSum]
    contexts: dict[str, ForbiddenSet]
    statements: list[InequalityStatement]
    groups: list[str]

    def verify(self, fail_fast: bool = False) -> BatchReport:
        return verify_batch(self.statements, self.names, fail_fast)

    def group(self, name: str) -> list[InequalityStatement]:
        return [s for s in self.statements if s.label.split("#")[0] == name]


def parse_ledger(text: str, source: str = "<string>") -> Ledger:
    """Line-oriented ledger.

    ``alphabet: 3``; ``macro w = 1211...``; ``value j0 = m(<...>)`` (exact
    Markov value of a doubly periodic word) or ``value j0 = lam0(...)``;
    ``context small = 131 313 ...``; ``[group name]`` optionally followed by
    ``given: small``; then one statement per line.  ``#`` starts a comment.
    """
    alphabet = 3
    macros: dict[str, str] = {}
    names: dict[str, RadicalSum] = {}
    contexts: dict[str, ForbiddenSet] = {}
    stmts: list[InequalityStatement] = []
    groups: list[str] = []
    group, given, count = "", None, 0
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith("alphabet:"):
                alphabet = int(line.split(":", 1)[1])
            elif line.startswith("macro "):
                k, v = line[6:].split("=", 1)
                macros[k.strip()] = v.strip()
            elif line.startswith("value "):
                k, v = line[6:].split("=", 1)
                names[k.strip()] = _named_value(expand_macros(v.strip(), macros), alphabet)
            elif line.startswith("context "):
                k, v = line[8:].split("=", 1)
                words = [expand_macros(x, macros) for x in v.split()]
                contexts[k.strip()] = ForbiddenSet.of(words, alphabet)
            elif line.startswith("["):
                group, given, count = line.strip("[]").strip(), None, 0
                groups.append(group)
            elif line.startswith("given:"):
                key = line.split(":", 1)[1].strip()
                if key not in contexts:
                    raise KeyError(f"unknown context {key!r}")
                given = contexts[key]
            else:
                count += 1
                stmts.append(parse_statement(line, alphabet, macros, f"{group}#{count}", given))
        except (ValueError, KeyError) as e:
            raise FormatError(f"{source}:{n}: {e}") from None
    return Ledger(alphabet, macros, names, contexts, stmts, groups)


def _named_value(text: str, alphabet: int) -> RadicalSum:
    m = re.match(r"^(lam0|m)\((.+)\)$", text)
    if not m:
        return RadicalSum.of(Fraction(text))
    seq = parse_word(m.group(2), alphabet)
    dp = DoublyPeriodicWord.from_sequence(seq)
    if m.group(1) == "m":
        return markov_value_dp(dp)[0].lower
    return lambda_dp(dp, dp.mark)


def load_ledger(path: str | Path) -> Ledger:
    p = Path(path)
    return parse_ledger(p.read_text(encoding="utf-8"), str(p))


def word_statement(word: str, relation: str, threshold: Fraction | str, alphabet: int = 3,
                   quantity: str = "lam0") -> InequalityStatement:
    """Convenience constructor for a plain numeric threshold."""
    mw = MarkedWord.parse(word, alphabet)
    return InequalityStatement(mw, relation, Threshold(Fraction(threshold)), quantity)


__all__ = [
    "BatchReport", "InequalityResult", "InequalityStatement", "Ledger", "Threshold",
    "load_ledger", "parse_ledger", "parse_statement", "parse_threshold",
    "verify_batch", "verify_inequality", "word_statement",
]
