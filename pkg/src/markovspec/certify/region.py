"""Regions of M \\ L just to the right of a periodic value j0 = m(<w>).

The pipeline has three certified stages, each an exhaustive forced-extension
search (see :mod:`.forced`):

* local uniqueness: every sequence avoiding the forbidden words whose lambda
  at the mark exceeds j0 - window contains a fixed block around the mark;
* self-replication: under tighter windows the block extends to copies of w on
  both sides;
* the region values j0 < m0 < m1 < j1 and the finite isolated set X, each
  checked to attain its Markov value where claimed.

The forbidden words themselves are justified mechanically: a word is usable
as context only if every sequence containing it has m at least j0 + m_window
(some position's least lambda reaches it), given the words justified before.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

from ..cf import SpectrumValue
from ..exact import RadicalSum
from ..extension import Val, engine_for
from ..markov import lambda_dp, markov_value_dp, periodic_markov
from ..subshift import FormatError, ForbiddenSet, normalize
from ..words import (DoublyPeriodicWord, MarkedBiSequence, MarkedWord, Word, as_word,
                     is_semi_symmetric, parse_word, transpose_word, word_str)
from .forced import (Hypotheses, JustifiedWords, Node, SearchResult, completion_witness, forced_search,
                     justify_words, replay)
from .inequalities import expand_macros

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

DATA = Path(__file__).resolve().parent.parent / "data" / "datasets"


# -- forced proofs -----------------------------------------------------------

def _matches(node: Node, block: Word, mark: int) -> bool:
    s = node.mark - mark
    return s >= 0 and node.word[s:s + len(block)] == block


@dataclass
class ForcedProof:
    """A closed forced-extension tree whose every surviving leaf shows the claim."""

    claim: MarkedWord
    context: ForbiddenSet
    hypotheses: Hypotheses
    roots: list[Node]
    search: SearchResult
    both_orientations: bool = False

    @property
    def passed(self) -> bool:
        return self.search.closed and bool(self.search.accepted)

    def accepts(self, node: Node) -> bool:
        c = self.claim
        if _matches(node, c.word, c.mark):
            return True
        return self.both_orientations and _matches(node, transpose_word(c.word), len(c.word) - 1 - c.mark)

    def replay(self) -> list[str]:
        return replay(self.search.tree, self.context, self.hypotheses, self.accepts)

    def witness(self) -> DoublyPeriodicWord | None:
        """An admissible completion of a surviving node, when the search failed."""
        if not self.search.frontier:
            return None
        eng = engine_for(normalize(self.context))
        return completion_witness(eng, self.search.frontier[0], upper=True)

    def summary(self) -> str:
        s = self.search
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{verdict} claim {self.claim}: {s.nodes} nodes, max length {s.max_len}, "
                f"{len(s.accepted)} accepted, {len(s.frontier)} open")


def _search(claim: MarkedWord, context: ForbiddenSet, hyp: Hypotheses, roots: list[Node],
            both: bool, max_len: int, node_cap: int, record: bool) -> ForcedProof:
    proof = ForcedProof(claim, context, hyp, roots, SearchResult(False), both)
    proof.search = forced_search(roots, context, hyp, proof.accepts, max_len=max_len,
                                 node_cap=node_cap, record=record)
    return proof


def periodic_value(w: Word) -> RadicalSum:
    return periodic_markov(w)[0]


def certify_local_uniqueness(w, claim: MarkedWord, window, F: ForbiddenSet,
                             replicating=(), max_len: int = 120, node_cap: int = 200_000,
                             record: bool = True) -> ForcedProof:
    """Every b avoiding F minus the replicating words with lambda_0(b) > j0 - window
    contains the claim (or its transpose) at the mark."""
    w = as_word(w)
    rep = {as_word(r) for r in replicating}
    rep |= {transpose_word(r) for r in rep}
    ctx = ForbiddenSet.of([f for f in F.words if f not in rep], F.alphabet)
    j0 = periodic_value(w)
    hyp = Hypotheses(lam_above=Val.of(j0 - Fraction(window)))
    roots = [Node((d,), 0) for d in range(1, F.alphabet + 1)]
    return _search(claim, ctx, hyp, roots, True, max_len, node_cap, record)


@dataclass
class ReplicationClaim:
    window: Fraction
    claim: MarkedWord
    avoid: list[Word] = field(default_factory=list)


@dataclass
class ReplicationReport:
    root: MarkedWord
    proofs: list[ForcedProof]
    shifts: list[list[int]]

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.proofs)

    def periodic(self, i: int) -> bool:
        """Whether claim i reproduces the root on both sides.

        Under m(b) < j0 + window every position satisfies the claim's
        hypothesis, so a root copy at shift s forces another one at 2s, and
        b is periodic.
        """
        s = self.shifts[i]
        return any(x > 0 for x in s) and any(x < 0 for x in s)


def certify_self_replication(w, root: MarkedWord, claims: list[ReplicationClaim], F: ForbiddenSet,
                             m_window, max_len: int = 160, node_cap: int = 200_000,
                             record: bool = True) -> ReplicationReport:
    """Each claim: b containing root at the mark, m(b) < j0 + m_window, lambda_0(b) < j0 +
    claim.window and avoiding claim.avoid contains claim.claim at the mark."""
    j0 = periodic_value(as_word(w))
    proofs, shifts = [], []
    for c in claims:
        ctx = ForbiddenSet.of(list(F.words) + list(c.avoid), F.alphabet)
        hyp = Hypotheses(lam_below=Val.of(j0 + c.window), m_below=Val.of(j0 + Fraction(m_window)))
        proofs.append(_search(c.claim, ctx, hyp, [Node(root.word, root.mark)], False,
                              max_len, node_cap, record))
        shifts.append(root_shifts(c.claim, root))
    return ReplicationReport(root, proofs, shifts)


def root_shifts(block: MarkedWord, root: MarkedWord) -> list[int]:
    """Nonzero shifts s such that root occurs in block with its mark at block.mark + s."""
    out = []
    for start in range(len(block.word) - len(root.word) + 1):
        if block.word[start:start + len(root.word)] == root.word:
            s = start + root.mark - block.mark
            if s:
                out.append(s)
    return out


# -- region values -------------------------------------------------------------

@dataclass
class RegionValue:
    name: str
    sequence: DoublyPeriodicWord
    value: SpectrumValue
    position: int | None
    at_mark: bool

    @property
    def exact(self) -> RadicalSum:
        return self.value.lower


def region_value(name: str, seq: DoublyPeriodicWord, check_mark: bool = True) -> RegionValue:
    """The Markov value of seq.  Without check_mark the mark is first moved to
    a position attaining it; at_mark then records whether one exists."""
    v, pos = markov_value_dp(seq)
    if not check_mark and pos is not None:
        seq = replace(seq, mark=pos)
    at_mark = lambda_dp(seq, seq.mark) == v.lower
    return RegionValue(name, seq, v, pos, at_mark)


@dataclass
class RegionDataset:
    name: str
    alphabet: int
    w: MarkedWord
    macros: dict[str, str]
    forbidden: list[Word]
    replicating: list[Word]
    m_window: Fraction
    local_window: Fraction
    local_claim: MarkedWord
    replication: list[ReplicationClaim]
    order: list[str]
    values: dict[str, DoublyPeriodicWord]
    isolated: list[DoublyPeriodicWord]


def _marked(text: str, alphabet: int) -> MarkedWord:
    return MarkedWord.parse(text, alphabet)


def _dp(text: str, alphabet: int) -> DoublyPeriodicWord:
    return DoublyPeriodicWord.from_sequence(parse_word(text, alphabet))


def parse_dataset(data: dict, source: str = "<dataset>") -> RegionDataset:
    try:
        A = int(data.get("alphabet", 3))
        macros = {str(k): str(v) for k, v in data.get("macros", {}).items()}

        def x(t: str) -> str:
            return expand_macros(t, macros)

        fb = data["forbidden"]
        lu = data["local_uniqueness"]
        reps = [ReplicationClaim(Fraction(r["window"]), _marked(x(r["claim"]), A),
                                 [as_word(x(a)) for a in r.get("avoid", [])])
                for r in data.get("self_replication", [])]
        vals = data.get("values", {})
        return RegionDataset(
            name=data.get("name", source),
            alphabet=A,
            w=_marked(x(data["w"]), A),
            macros=macros,
            forbidden=[as_word(x(f)) for f in fb["words"]],
            replicating=[as_word(x(f)) for f in fb.get("replicating", [])],
            m_window=Fraction(fb.get("m_window", lu["window"])),
            local_window=Fraction(lu["window"]),
            local_claim=_marked(x(lu["claim"]), A),
            replication=reps,
            order=list(vals.get("order", ["j0", "j1"])),
            values={k: _dp(x(v), A) for k, v in vals.items() if k != "order"},
            isolated=[_dp(x(s), A) for s in data.get("isolated", {}).get("sequences", [])],
        )
    except (KeyError, ValueError, TypeError) as e:
        raise FormatError(f"{source}: {e}") from e


def load_dataset(path: str | Path) -> RegionDataset:
    p = Path(path)
    if not p.exists() and (DATA / p.name).exists():
        p = DATA / p.name
    with open(p, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as e:
            raise FormatError(f"{p}: {e}") from e
    return parse_dataset(data, str(p))


@dataclass
class MLRegion:
    w: Word
    F: ForbiddenSet
    justification: JustifiedWords
    values: dict[str, RegionValue]
    X: list[RegionValue]
    local_window: Fraction
    local: ForcedProof | None
    replication: ReplicationReport | None
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def j0(self) -> RegionValue:
        return self.values["j0"]

    def gap(self, name: str) -> RadicalSum:
        """The value name minus j0, exactly."""
        return self.values[name].exact - self.j0.exact


def characterize_ml_region(ds: RegionDataset | str | Path, certify: bool = True,
                           node_cap: int = 200_000) -> MLRegion:
    """Compute and check j0, the other region values and X; optionally certify the
    local uniqueness and self-replication stages first."""
    if not isinstance(ds, RegionDataset):
        ds = load_dataset(ds)
    A = ds.alphabet
    w = ds.w.word
    fail = []
    if len(w) % 2 == 0 or is_semi_symmetric(w):
        fail.append(f"w = {word_str(w)} must be odd and not semi-symmetric")

    F = ForbiddenSet.of(ds.forbidden, A)
    j0 = region_value("j0", DoublyPeriodicWord(w, (), w, ds.w.mark))
    if not j0.at_mark:
        fail.append("j0: m(<w>) is not attained at the mark of w")
    rep = set(ds.replicating) | {transpose_word(r) for r in ds.replicating}
    just = justify_words([f for f in ds.forbidden if f not in rep],
                         Val.of(j0.exact + ds.m_window), A)

    local = replication = None
    if certify:
        ctx = just.forbidden()
        local = certify_local_uniqueness(w, ds.local_claim, ds.local_window, ctx, ds.replicating,
                                         node_cap=node_cap)
        if not local.passed:
            fail.append("local uniqueness: " + local.summary())
        if ds.replication:
            replication = certify_self_replication(w, ds.local_claim, ds.replication, ctx,
                                                   ds.m_window, node_cap=node_cap)
            for i, p in enumerate(replication.proofs):
                if not p.passed:
                    fail.append(f"self-replication claim {i + 1}: " + p.summary())

    values = {"j0": j0}
    for name, seq in ds.values.items():
        rv = region_value(name, seq)
        if not rv.at_mark:
            fail.append(f"{name}: Markov value not attained at the mark")
        values[name] = rv
    for a, b in zip(ds.order, ds.order[1:]):
        if not values[a].exact < values[b].exact:
            fail.append(f"order: {a} < {b} fails")
    X = [region_value(f"X{i + 1}", s, check_mark=False) for i, s in enumerate(ds.isolated)]
    hi = values[ds.order[-1]].exact
    for x in X:
        if not x.at_mark:
            fail.append(f"{x.name}: Markov value not attained at any finite position")
        if not (j0.exact < x.exact < hi):
            fail.append(f"{x.name} = {float(x.exact):.15f} is not inside (j0, {ds.order[-1]})")
    return MLRegion(w, F, just, values, X, ds.local_window, local, replication, fail)


__all__ = ["ForcedProof", "MLRegion", "RegionDataset", "RegionValue",
           "ReplicationClaim", "ReplicationReport", "certify_local_uniqueness",
           "certify_self_replication", "characterize_ml_region",
           "load_dataset", "parse_dataset", "region_value", "root_shifts"]
