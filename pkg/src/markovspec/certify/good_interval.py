"""Checking good-interval certificates.

A certificate names two symmetric subshifts Sigma(B) inside Sigma(C), the
claimed supremum x of m over Sigma(B), the claimed minimum y of m over
sequences containing a trigger word of C, and case rules.  A case rule says:
after a context ending in ``pattern``, whenever a sequence of Sigma(C) admits
continuations v1 (first digit d1) and v2 (first digit d2 > d1), the
continuation v_B of Sigma(B) satisfies [0; v1] >= [0; v_B] >= [0; v2], and
every lambda_j at positions inside v_B past its first digit is at most x.

The checker does not trust the prose behind these claims: coverage of all
contexts is enumerated from C's automaton, orderings are decided exactly over
all admissible tails, and every position of the eventually periodic v_B is
matched against a verified obligation.
"""

from __future__ import annotations

import hashlib
import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from ..cf import eval_eventually_periodic
from ..exact import RadicalSum
from ..extension import Engine, Val
from ..markov import markov_value_dp
from ..subshift import ForbiddenSet, FormatError, is_transitive, normalize
from ..words import DoublyPeriodicWord, MarkedWord, Word, as_word, parse_word, transpose_word, word_str
from .extremal import Direction, extremal_markov
from .inequalities import InequalityStatement, parse_statement, verify_batch

DATA = Path(__file__).resolve().parent.parent / "data" / "certs"


@dataclass(frozen=True)
class Continuation:
    prefix: Word
    period: Word

    @staticmethod
    def parse(text: str) -> "Continuation":
        m = re.fullmatch(r"\s*(\d*)<(\d+)>\s*", text)
        if not m:
            raise ValueError(f"bad continuation {text!r}; expected prefix<period>")
        return Continuation(as_word(m.group(1)), as_word(m.group(2)))

    def digits(self, n: int) -> Word:
        out = list(self.prefix)
        while len(out) < n:
            out.extend(self.period)
        return tuple(out[:n])

    def value(self) -> RadicalSum:
        return RadicalSum.of(eval_eventually_periodic(self.prefix, self.period))

    def __str__(self) -> str:
        return f"{word_str(self.prefix)}<{word_str(self.period)}>"


@dataclass
class CaseRule:
    pattern: Word
    d1: int
    d2: int
    continuation: Continuation
    obligations: list[InequalityStatement] = field(default_factory=list)
    line: int = 0

    def matches(self, context: Word, d1: int, d2: int) -> bool:
        n = len(self.pattern)
        return (self.d1, self.d2) == (d1, d2) and (n == 0 or context[-n:] == self.pattern)


@dataclass
class GoodIntervalCertificate:
    name: str
    alphabet: int
    B: ForbiddenSet
    C: ForbiddenSet
    x: DoublyPeriodicWord
    y: DoublyPeriodicWord
    trigger: Word
    cases: list[CaseRule]
    context_length: int = 0
    digest: str = ""


@dataclass
class CheckOutcome:
    check: str
    ok: bool
    detail: str


@dataclass
class GoodIntervalReport:
    name: str
    outcomes: list[CheckOutcome] = field(default_factory=list)
    x_value: RadicalSum | None = None
    y_value: RadicalSum | None = None

    @property
    def passed(self) -> bool:
        return bool(self.outcomes) and all(o.ok for o in self.outcomes)

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def first_failure(self) -> CheckOutcome | None:
        return next((o for o in self.outcomes if not o.ok), None)

    def add(self, check: str, ok: bool, detail: str) -> bool:
        self.outcomes.append(CheckOutcome(check, ok, detail))
        return ok


# -- checks -------------------------------------------------------------

def subshift_included(b: ForbiddenSet, c: ForbiddenSet) -> list[Word]:
    """Words of C occurring in some sequence of Sigma(B) (empty iff Sigma(B) is inside Sigma(C))."""
    aut = Engine(normalize(b)).aut
    bad = []
    for w in c:
        if any(aut.run(w, s) in aut.live for s in aut.essential):
            bad.append(w)
    return bad


def min_over_containing_bound(alphabet: int) -> Fraction:
    """Lower bound on m of any sequence using a digit above the alphabet.

    Such a sequence has a digit d >= A + 1; either some digit is >= A + 2, or
    both neighbours of d are <= A + 1 and each side contributes more than
    1/(A + 2).
    """
    return Fraction(alphabet + 1) + Fraction(2, alphabet + 2)


def contexts(c: ForbiddenSet, length: int) -> list[tuple[Word, int, int]]:
    """Admissible (context, d1, d2) with d1 < d2 both continuing the context."""
    eng = Engine(normalize(c))
    out = []
    for u in itertools.product(range(1, c.alphabet + 1), repeat=length):
        if eng.states(u) is None:
            continue
        ds = [d for d in range(1, c.alphabet + 1) if eng.states(u + (d,)) is not None]
        for d1, d2 in itertools.combinations(ds, 2):
            out.append((u, d1, d2))
    return out


def _side_extreme(eng: Engine, context: Word, d: int, least: bool) -> Val:
    """Least or greatest [0; v] over continuations v of context starting with d."""
    st = eng.states(context + (d,))
    side = eng.side((d,), st[0], least=least)
    return Val(side.lo, side.hi, lambda: RadicalSum.of(side.exact()))


def _periodic_ok(eng: Engine, word: Word, period: Word) -> bool:
    """Whether word followed by period forever has a left extension and avoids the set."""
    if eng.states(word + period) is None:
        return False
    s, seen = eng.aut.run(word), set()
    while s >= 0 and s not in seen:
        seen.add(s)
        s = eng.aut.run(period, s)
    return s >= 0


def _junction_ok(eng: Engine, context: Word, cont: Continuation) -> bool:
    return _periodic_ok(eng, context + cont.prefix, cont.period)


def _covering(obligations: list[InequalityStatement], known: Word, k: int,
              x_val: RadicalSum, names: dict) -> InequalityStatement | None:
    """An upper-bound obligation whose window (or its transpose) sits at k in known."""
    for ob in obligations:
        if not isinstance(ob.subject, MarkedWord) or ob.lower or ob.quantity != "lam0":
            continue
        if ob.threshold.resolve(names) > x_val:
            continue
        for mw in (ob.subject, ob.subject.transpose()):
            start = k - mw.mark
            if start < 0 or start + len(mw.word) > len(known):
                continue
            if known[start:start + len(mw.word)] == mw.word:
                return ob
    return None


def certify_good_interval(cert: GoodIntervalCertificate, node_cap: int = 200_000) -> GoodIntervalReport:
    rep = GoodIntervalReport(cert.name)
    B, C = normalize(cert.B), normalize(cert.C)

    # (a) inclusion
    bad = subshift_included(B, C)
    rep.add("a:inclusion", not bad,
            "Sigma(B) avoids every word of C" if not bad else
            "words of C occurring in Sigma(B): " + ", ".join(map(word_str, bad)))

    # (b) transitivity
    for label, f in (("B", B), ("C", C)):
        try:
            ok, _ = is_transitive(f)
        except ValueError as e:
            ok = False
            detail = str(e)
        else:
            detail = "transitive" if ok else "not transitive"
        rep.add(f"b:transitive-{label}", ok, f"Sigma({label}) {detail}")

    # (c) x is the maximum over Sigma(B)
    x_claim = markov_value_dp(cert.x)[0].lower
    rep.x_value = x_claim
    mx = extremal_markov(B, Direction.MAX, node_cap=node_cap)
    ok = not mx.partial and mx.exact is not None and mx.exact <= x_claim
    rep.add("c:max-B", ok, f"max over Sigma(B) = {float(mx.exact):.12f}, claimed x = {float(x_claim):.12f}"
            + ("" if mx.exact == x_claim else " (claim is an upper bound)" if ok else ""))

    # (d) every sequence outside Sigma(C) has m >= y; the trigger attains y
    y_claim = markov_value_dp(cert.y)[0].lower
    rep.y_value = y_claim
    ok = y_claim <= min_over_containing_bound(cert.alphabet)
    rep.add("d:alphabet", ok, f"sequences with digits above {cert.alphabet} have m >= "
            f"{float(min_over_containing_bound(cert.alphabet)):.6f}")
    trig = cert.trigger
    if trig not in C and transpose_word(trig) not in C:
        rep.add("d:trigger", False, f"trigger {word_str(trig)} is not a word of C")
    done = set()
    for w in C:
        key = min(w, transpose_word(w))
        if key in done:
            continue
        done.add(key)
        res = extremal_markov(ForbiddenSet.of([], cert.alphabet), Direction.MIN, required=w, node_cap=node_cap)
        lo = res.enclosure.lo
        if res.partial or res.exact is None:
            ok = lo >= y_claim.enclosure(128).hi
            detail = f"min containing {word_str(w)} >= {float(lo):.12f} (partial search)"
        else:
            ok = res.exact >= y_claim
            detail = f"min containing {word_str(w)} = {float(res.exact):.12f}"
        is_trigger = key == min(trig, transpose_word(trig))
        if is_trigger:
            ok = ok and res.exact is not None and res.exact == y_claim
            detail += " (trigger, must equal y)"
        rep.add(f"d:min-{word_str(w)}", ok, detail)

    # (e) coverage, (f) ordering, (g) obligations
    length = max(cert.context_length, C.max_len - 1, 1)
    engC = Engine(C)
    names = {"x": x_claim, "y": y_claim}
    used: dict[int, list[tuple[Word, int, int]]] = {}
    uncovered = []
    for u, d1, d2 in contexts(C, length):
        case = next((c for c in cert.cases if c.matches(u, d1, d2)), None)
        if case is None:
            uncovered.append((u, d1, d2))
        else:
            used.setdefault(id(case), []).append((u, d1, d2))
    rep.add("e:coverage", not uncovered,
            f"{sum(map(len, used.values()))} context/digit triples covered" if not uncovered else
            "uncovered: " + ", ".join(f"{word_str(u)}|{d1}/{d2}" for u, d1, d2 in uncovered[:8]))

    for idx, case in enumerate(cert.cases, 1):
        where = f"case {idx} (line {case.line})"
        triples = used.get(id(case), [])
        if not avoids_continuation(B, case.continuation):
            rep.add(f"f:{idx}:continuation", False, f"{where}: {case.continuation} is not in Sigma+(B)")
            continue
        vb = Val.of(case.continuation.value())
        bad_order = []
        for u, d1, d2 in triples:
            if not _junction_ok(engC, u, case.continuation):
                bad_order.append(f"{word_str(u)}+{case.continuation} leaves Sigma(C)")
                continue
            lo1 = _side_extreme(engC, u, d1, least=True)
            hi2 = _side_extreme(engC, u, d2, least=False)
            if lo1 < vb:
                bad_order.append(f"{word_str(u)}: min [0;{d1}..] < [0;v_B]")
            if hi2 > vb:
                bad_order.append(f"{word_str(u)}: max [0;{d2}..] > [0;v_B]")
        rep.add(f"f:{idx}:ordering", not bad_order,
                f"{where}: [0;v1] >= [0;{case.continuation}] >= [0;v2] on {len(triples)} contexts"
                if not bad_order else f"{where}: " + "; ".join(bad_order[:4]))

        # obligations: verified over Sigma(C), then matched against every position of v_B
        stmts = [InequalityStatement(o.subject, o.relation, o.threshold, o.quantity, o.label, C)
                 for o in case.obligations]
        batch = verify_batch(stmts, names)
        fails = [str(r.statement) for r in batch.failures]
        rep.add(f"g:{idx}:obligations", not fails,
                f"{where}: {len(stmts)} obligations verified" if not fails else f"{where}: false: " + "; ".join(fails))
        wmax = max((len(o.subject.word) for o in stmts if isinstance(o.subject, MarkedWord)), default=1)
        cont = case.continuation
        span = len(cont.prefix) + wmax + len(cont.period) + 1
        known = cont.digits(span + wmax)
        missing = [k for k in range(1, span + 1) if _covering(stmts, known, k, x_claim, names) is None]
        rep.add(f"g:{idx}:positions", not missing,
                f"{where}: positions 1..{span} of v_B covered (periodic beyond)" if not missing else
                f"{where}: no obligation bounds position(s) {missing[:6]} of {cont}")
    if not cert.cases:
        rep.add("e:cases", False, "certificate has no case rules")
    return rep


def avoids_continuation(b: ForbiddenSet, cont: Continuation) -> bool:
    """Whether the one-sided sequence lies in Sigma+(B)."""
    return _periodic_ok(Engine(normalize(b)), cont.prefix, cont.period)


# -- file format ----------------------------------------------------------

_SECTIONS = ("meta", "B", "C", "x", "y", "case", "obligation")


def parse_certificate(text: str, source: str = "<string>") -> GoodIntervalCertificate:
    """Parse the line-oriented certificate format.

    Sections: ``[meta]`` (name, alphabet, context_length), ``[B]`` and
    ``[C]`` (forbidden words), ``[x]`` and ``[y]`` (one doubly periodic word
    each; ``[y]`` also takes ``trigger = word``), ``[case]`` (``pattern``,
    ``v1``, ``v2``, ``continuation``) and ``[obligation]`` (statements
    attached to the latest case; names ``x`` and ``y`` are available).
    """
    meta: dict[str, str] = {}
    words: dict[str, list[tuple[str, int]]] = {"B": [], "C": []}
    single: dict[str, tuple[str, int]] = {}
    trigger = None
    cases: list[CaseRule] = []
    case_fields: dict[str, str] | None = None
    case_line = 0
    section = None

    def close_case():
        nonlocal case_fields
        if case_fields is None:
            return
        try:
            cases.append(CaseRule(as_word(case_fields.get("pattern", "")), int(case_fields["v1"]),
                                  int(case_fields["v2"]), Continuation.parse(case_fields["continuation"]),
                                  line=case_line))
        except KeyError as e:
            raise FormatError(f"{source}:{case_line}: case is missing {e.args[0]}") from None
        except ValueError as e:
            raise FormatError(f"{source}:{case_line}: {e}") from None
        case_fields = None

    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise FormatError(f"{source}:{n}: unknown section [{section}]")
            if section == "case":
                close_case()
                case_fields, case_line = {}, n
            continue
        if section is None:
            raise FormatError(f"{source}:{n}: content before any section")
        if section == "meta":
            k, _, v = line.partition("=")
            meta[k.strip()] = v.strip()
        elif section in ("B", "C"):
            words[section].extend((w, n) for w in line.replace(",", " ").split())
        elif section in ("x", "y"):
            if "=" in line:
                k, _, v = line.partition("=")
                if k.strip() != "trigger" or section != "y":
                    raise FormatError(f"{source}:{n}: unexpected key {k.strip()!r}")
                trigger = v.strip()
            else:
                single[section] = (line, n)
        elif section == "case":
            k, _, v = line.partition("=")
            case_fields[k.strip()] = v.strip()
        elif section == "obligation":
            close_case()
            if not cases:
                raise FormatError(f"{source}:{n}: obligation before any case")
            try:
                cases[-1].obligations.append(parse_statement(line, int(meta.get("alphabet", 2)),
                                                             label=f"line {n}"))
            except ValueError as e:
                raise FormatError(f"{source}:{n}: {e}") from None
    close_case()
    try:
        alphabet = int(meta["alphabet"])
    except KeyError:
        raise FormatError(f"{source}: [meta] needs alphabet") from None
    except ValueError as e:
        raise FormatError(f"{source}: {e}") from None
    B, C = (_word_set(words[k], alphabet, source) for k in ("B", "C"))
    try:
        x = DoublyPeriodicWord.from_sequence(parse_word(single["x"][0], alphabet))
        y = DoublyPeriodicWord.from_sequence(parse_word(single["y"][0], alphabet))
    except KeyError as e:
        raise FormatError(f"{source}: missing {e.args[0]}") from None
    except ValueError as e:
        raise FormatError(f"{source}: {e}") from None
    if trigger is None:
        raise FormatError(f"{source}: [y] needs trigger = word")
    digest = hashlib.sha256(text.encode()).hexdigest()[:16]
    return GoodIntervalCertificate(meta.get("name", source), alphabet, B, C, x, y, as_word(trigger),
                                   cases, int(meta.get("context_length", 0)), digest)


def _word_set(items: list[tuple[str, int]], alphabet: int, source: str) -> ForbiddenSet:
    for w, n in items:
        if not re.fullmatch(r"[1-9]+", w) or max(map(int, w)) > alphabet:
            raise FormatError(f"{source}:{n}: bad word {w!r} for alphabet {alphabet}")
    return ForbiddenSet.of([w for w, _ in items], alphabet)


def load_certificate(path: str | Path) -> GoodIntervalCertificate:
    p = Path(path)
    if not p.exists() and (DATA / p.name).exists():
        p = DATA / p.name
    return parse_certificate(p.read_text(encoding="utf-8"), str(p))
