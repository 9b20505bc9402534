"""Certification that an open interval (nu, mu) misses the Markov spectrum.

By shift invariance it suffices to exclude sequences b with m(b) = lambda_0(b)
in (nu, mu).  A forced-extension search over central words marked at 0 closes
every branch by one of: lambda_0 certainly <= nu or >= mu, some other position
reaching mu or beating the mark, or a forbidden word.  Forbidden words are
justified first (every sequence containing one has m >= mu), either by a local
lambda bound or by minimizing m over the sequences that contain it; the
latter is what closes the branches converging to the endpoint sequences.
The endpoints are checked to be Markov values attained at their marks.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from ..cf import SpectrumValue
from ..extension import Val, engine_for
from ..markov import lambda_dp, markov_value_dp, periodic_markov
from ..subshift import FormatError, ForbiddenSet, normalize
from ..words import DoublyPeriodicWord, Word, as_word, parse_word, word_str
from .forced import (Hypotheses, JustifiedWords, Node, completion_witness, forced_search,
                     justify_words)

DATA = Path(__file__).resolve().parent.parent / "data" / "certs"


@dataclass
class GapTranscript:
    nodes: int
    max_len: int
    reasons: dict[str, int]
    justified: list[tuple[str, str]]
    minimized: int


@dataclass
class GapCertificate:
    name: str
    alphabet: int
    nu: DoublyPeriodicWord | Fraction
    mu: DoublyPeriodicWord | Fraction
    forbidden: list[Word] = field(default_factory=list)
    max_len: int = 120
    node_cap: int = 200_000
    min_node_cap: int = 100_000
    transcript: GapTranscript | None = None


@dataclass
class GapReport:
    verdict: str  # PASS, FAIL or INCONCLUSIVE
    nu_value: SpectrumValue
    mu_value: SpectrumValue
    failures: list[str] = field(default_factory=list)
    transcript: GapTranscript | None = None
    justification: JustifiedWords | None = None
    witness: tuple[Word, SpectrumValue] | None = None
    frontier: list[Node] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"


def _endpoint(name: str, seq: DoublyPeriodicWord | Fraction, fails: list[str]) -> SpectrumValue:
    if isinstance(seq, Fraction):
        return SpectrumValue.exactly(seq)
    v, _ = markov_value_dp(seq)
    if lambda_dp(seq, seq.mark) != v.lower:
        fails.append(f"{name}: Markov value is not attained at the mark")
    return v


def find_witness(nodes, lo: Val, hi: Val, limit: int = 2000) -> tuple[Word, SpectrumValue] | None:
    """A periodic word whose Markov value lies in (lo, hi), built from surviving nodes."""
    for node in nodes[:limit]:
        v, _ = periodic_markov(node.word)
        val = Val.of(v)
        if lo < val < hi:
            return node.word, SpectrumValue.exactly(v)
    return None


def certify_gap(nu: DoublyPeriodicWord | Fraction | str, mu: DoublyPeriodicWord | Fraction | str, alphabet: int = 3,
                forbidden=(), max_len: int = 120, node_cap: int = 200_000,
                min_node_cap: int = 100_000, name: str = "gap") -> GapReport:
    """Certify that (m(nu), m(mu)) contains no Markov value and both ends do.

    Endpoints are doubly periodic words or rationals (``"4.6"``); a rational
    endpoint is not checked for membership.
    """
    cert = GapCertificate(name, alphabet, _as_dp(nu, alphabet), _as_dp(mu, alphabet),
                          [as_word(w) for w in forbidden], max_len, node_cap, min_node_cap)
    return check_gap(cert)


def _as_dp(x, alphabet: int) -> DoublyPeriodicWord | Fraction:
    """A doubly periodic word, or a rational for an endpoint given as a number."""
    if isinstance(x, (DoublyPeriodicWord, Fraction)):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if "<" not in x:
        return Fraction(x)
    return DoublyPeriodicWord.from_sequence(parse_word(x, alphabet))


def check_gap(cert: GapCertificate) -> GapReport:
    fails: list[str] = []
    nv = _endpoint("nu", cert.nu, fails)
    mv = _endpoint("mu", cert.mu, fails)
    lo, hi = Val.of(nv.lower), Val.of(mv.lower)
    report = GapReport("FAIL", nv, mv, fails)
    if isinstance(cert.nu, Fraction) or isinstance(cert.mu, Fraction):
        report.notes.append("an endpoint is a number: only the open interval is examined")
    if not lo < hi:
        fails.append("nu must be smaller than mu")
        return report

    just = justify_words(cert.forbidden, hi, cert.alphabet, use_min=True, node_cap=cert.min_node_cap)
    report.justification = just
    for w in just.unjustified:
        fails.append(f"forbidden word {word_str(w)} is not justified (m >= mu not shown)")
    ctx = just.forbidden()

    hyp = Hypotheses(lam_above=lo, lam_below=hi, m_below=hi, sup_at_mark=True)
    roots = [Node((d,), 0) for d in range(1, cert.alphabet + 1)]
    res = forced_search(roots, ctx, hyp, lambda n: False, max_len=cert.max_len, node_cap=cert.node_cap)
    report.transcript = GapTranscript(
        res.nodes, res.max_len, dict(res.reasons),
        [(word_str(j.word), j.how) for j in just.justified],
        sum(j.how == "min" for j in just.justified))
    cert.transcript = report.transcript
    report.frontier = res.frontier
    if res.closed:
        report.verdict = "PASS" if not fails else "FAIL"
        return report
    report.witness = find_witness(res.frontier, lo, hi)
    if report.witness is not None:
        fails.append(f"m(<{word_str(report.witness[0])}>) = {report.witness[1]} lies inside the interval")
        report.verdict = "FAIL"
    else:
        fails.append(f"search open: {len(res.frontier)} nodes survive (cap {cert.node_cap}, "
                     f"length {cert.max_len})")
        report.verdict = "INCONCLUSIVE"
    return report


def surviving_completion(report: GapReport, cert: GapCertificate) -> DoublyPeriodicWord | None:
    if not report.frontier:
        return None
    eng = engine_for(normalize(report.justification.forbidden()))
    return completion_witness(eng, report.frontier[0], upper=True)


_SECTIONS = {"meta", "nu", "mu", "forbidden", "search"}


def parse_gap_certificate(text: str, source: str = "<string>") -> GapCertificate:
    """Sections ``[meta]`` (name, alphabet), ``[nu]`` and ``[mu]`` (one doubly
    periodic word each), ``[forbidden]`` (words, transposes implied) and
    ``[search]`` (max_len, node_cap, min_node_cap)."""
    meta: dict[str, str] = {}
    search: dict[str, str] = {}
    ends: dict[str, tuple[str, int]] = {}
    words: list[str] = []
    section = None
    alphabet = 3
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise FormatError(f"{source}:{n}: unknown section [{section}]")
            continue
        if section is None:
            raise FormatError(f"{source}:{n}: content before any section")
        if section in ("meta", "search"):
            k, sep, v = line.partition("=")
            if not sep:
                raise FormatError(f"{source}:{n}: expected key = value")
            (meta if section == "meta" else search)[k.strip()] = v.strip()
            if section == "meta" and k.strip() == "alphabet":
                try:
                    alphabet = int(v)
                except ValueError:
                    raise FormatError(f"{source}:{n}: bad alphabet {v.strip()!r}") from None
        elif section in ("nu", "mu"):
            if section in ends:
                raise FormatError(f"{source}:{n}: [{section}] takes one word")
            ends[section] = (line, n)
        else:
            for w in line.replace(",", " ").split():
                if not re.fullmatch(r"[1-9]+", w) or max(map(int, w)) > alphabet:
                    raise FormatError(f"{source}:{n}: bad word {w!r} for alphabet {alphabet}")
                words.append(w)
    for k in ("nu", "mu"):
        if k not in ends:
            raise FormatError(f"{source}: missing [{k}]")
    try:
        nu, mu = (_parse_end(ends[k], alphabet, source) for k in ("nu", "mu"))
        return GapCertificate(meta.get("name", source), alphabet, nu, mu,
                              [as_word(w) for w in words],
                              int(search.get("max_len", 120)), int(search.get("node_cap", 200_000)),
                              int(search.get("min_node_cap", 100_000)))
    except FormatError:
        raise
    except ValueError as e:
        raise FormatError(f"{source}: {e}") from None


def _parse_end(item: tuple[str, int], alphabet: int, source: str) -> DoublyPeriodicWord:
    text, n = item
    try:
        return _as_dp(text, alphabet)
    except ValueError as e:
        raise FormatError(f"{source}:{n}: {e}") from None


def load_gap_certificate(path: str | Path) -> GapCertificate:
    p = Path(path)
    if not p.exists() and (DATA / p.name).exists():
        p = DATA / p.name
    return parse_gap_certificate(p.read_text(encoding="utf-8"), str(p))


__all__ = ["GapCertificate", "GapReport", "GapTranscript", "certify_gap", "check_gap",
           "find_witness", "load_gap_certificate", "parse_gap_certificate", "surviving_completion"]
