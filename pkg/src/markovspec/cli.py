"""Command-line front end.

Every command prints a report whose verdict section depends only on the
inputs and the search caps; timings are printed after it.  Exit codes:
0 PASS or success, 1 FAIL, 2 INCONCLUSIVE, 3 usage or format error.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .cf import SpectrumValue, lambda0, to_decimal
from .subshift import FormatError, avoids_periodic, is_transitive, load_fset
from .words import DoublyPeriodicWord, WordSyntaxError, format_word, parse_word, word_str

DATA = Path(__file__).resolve().parent / "data"
EXIT = {"PASS": 0, "FAIL": 1, "INCONCLUSIVE": 2}
USAGE_ERROR = 3


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    command: str
    inputs: dict[str, str] = field(default_factory=dict)  # path -> sha256
    verdict: str = "PASS"
    lines: list[str] = field(default_factory=list)
    margins: list[str] = field(default_factory=list)
    transcript: list[str] = field(default_factory=list)
    seconds: float = 0.0

    def verdict_section(self) -> str:
        out = [f"command: {self.command}"]
        out += [f"input: {p} sha256={d}" for p, d in self.inputs.items()]
        out += self.lines
        out += [f"margin: {m}" for m in self.margins]
        out += [f"transcript: {t}" for t in self.transcript]
        out.append(f"verdict: {self.verdict}")
        return "\n".join(out)

    def render(self) -> str:
        return self.verdict_section() + f"\ntime: {self.seconds:.2f}s"


def _parser_error(self, message):
    self.print_usage(sys.stderr)
    self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


class _Parser(argparse.ArgumentParser):
    error = _parser_error


def resolve(path: str, kind: str) -> Path:
    """A file path as given, or else one of the bundled data files."""
    p = Path(path)
    for cand in (p, DATA / p, DATA / kind / p.name):
        if cand.is_file():
            return cand
    raise UsageError(f"no such file: {path}")


def digest(p: Path) -> str:
    return hashlib.sha256(p.read_bytes()).hexdigest()


def _value(v: SpectrumValue, digits: int, exact: bool) -> str:
    text = to_decimal(v, digits)
    if exact and v.is_exact:
        text += f"  = {v.lower}"
    return text


def _worst(verdicts) -> str:
    vs = list(verdicts)
    for v in ("FAIL", "INCONCLUSIVE"):
        if v in vs:
            return v
    return "PASS"


# -- commands ----------------------------------------------------------------

def cmd_eval(args) -> RunReport:
    seq = parse_word(args.word, 9)
    v = lambda0(seq)
    rep = RunReport(f"eval {args.word}")
    rep.lines.append(f"lambda_0({format_word(seq)}) = {_value(v, args.digits, args.exact)}")
    return rep


def cmd_markov(args) -> RunReport:
    from .markov import lambda_dp, markov_value_dp, simplify_dp

    seq = parse_word(args.word, 9)
    if not seq.is_doubly_periodic:
        raise UsageError("markov needs a doubly periodic word such as <12>3*113<21>")
    w = DoublyPeriodicWord.from_sequence(seq)
    v, pos = markov_value_dp(w)
    rep = RunReport(f"markov {args.word}")
    rep.lines.append(f"m({format_word(seq)}) = {_value(v, args.digits, args.exact)}")
    if lambda_dp(w, w.mark) == v.lower:
        rep.lines.append("attained at: the mark")
    elif pos is None:
        rep.lines.append("attained: only along a periodic tail")
    else:
        off = pos - w.mark
        s = simplify_dp(w)
        if s.is_purely_periodic:
            n = len(s.p1)
            off %= n
            off = off - n if 2 * off > n else off
        where = f"position {off:+d} from the mark"
        rep.lines.append(f"attained at: {where}")
    return rep


def cmd_transitive(args) -> RunReport:
    p = resolve(args.fset, "datasets")
    f = load_fset(p)
    rep = RunReport(f"transitive {args.fset}", {args.fset: digest(p)})
    ok, _ = is_transitive(f)
    rep.lines.append(f"alphabet {f.alphabet}, {len(f.words)} forbidden words (transposes included)")
    rep.lines.append(f"transitive: {str(ok).lower()}")
    letter = next((d for d in range(1, f.alphabet + 1) if avoids_periodic((d,), f)), None)
    if letter is not None:
        _, table = is_transitive(f, letter, args.cap)
        for w, tau in sorted(table.items()):
            shown = "(cap exhausted)" if tau is None else (word_str(tau) or "(empty)")
            rep.lines.append(f"  {word_str(w)}: {word_str(w[:-1])} {shown} {letter}^inf")
        if any(t is None for t in table.values()):
            rep.transcript.append("some connecting words not found within the cap")
    rep.verdict = "PASS" if ok else "FAIL"
    return rep


def cmd_extremal(args) -> RunReport:
    from .certify.extremal import Direction, extremal_markov

    p = resolve(args.fset, "datasets")
    f = load_fset(p)
    rep = RunReport(f"extremal {args.fset} --{args.direction}", {args.fset: digest(p)})
    r = extremal_markov(f, Direction(args.direction), required=args.required, node_cap=args.node_cap)
    if r.value is not None:
        rep.lines.append(f"{args.direction} m = {_value(r.value, args.digits, args.exact)}")
    rep.lines.append(f"enclosure: [{float(r.enclosure.lo):.15f}, {float(r.enclosure.hi):.15f}]")
    if r.witness is not None:
        rep.lines.append(f"witness: {format_word(r.witness.to_sequence())}")
    rep.transcript.append(f"{r.nodes} nodes")
    rep.transcript += r.notes
    rep.verdict = "INCONCLUSIVE" if r.partial or r.value is None else "PASS"
    return rep


def certify_one(kind: str, path: str, opts: dict) -> RunReport:
    """Run one certificate; a top-level function so worker processes can call it."""
    t0 = time.perf_counter()
    p = resolve(path, "datasets" if kind == "local-uniqueness" else "certs")
    rep = RunReport(f"certify {kind} {path}", {path: digest(p)})
    if kind == "good-interval":
        _good_interval(p, rep)
    elif kind == "gap":
        _gap(p, rep, opts)
    else:
        _local_uniqueness(p, rep, opts)
    rep.seconds = time.perf_counter() - t0
    return rep


def _good_interval(p: Path, rep: RunReport) -> None:
    from .certify.good_interval import certify_good_interval, load_certificate

    r = certify_good_interval(load_certificate(p))
    if r.x_value is not None:
        rep.lines.append(f"x value: {to_decimal(r.x_value, 12)}")
    if r.y_value is not None:
        rep.lines.append(f"y value: {to_decimal(r.y_value, 12)}")
    for o in r.outcomes:
        rep.lines.append(f"{'ok  ' if o.ok else 'FAIL'} {o.check}: {o.detail}")
    rep.verdict = r.verdict


def _gap(p: Path, rep: RunReport, opts: dict) -> None:
    from .certify.gaps import check_gap, load_gap_certificate

    cert = load_gap_certificate(p)
    if opts.get("node_cap"):
        cert.node_cap = opts["node_cap"]
    r = check_gap(cert)
    rep.lines.append(f"nu = {to_decimal(r.nu_value, 12)}")
    rep.lines.append(f"mu = {to_decimal(r.mu_value, 12)}")
    rep.lines += [f"note: {n}" for n in r.notes]
    rep.lines += [f"failure: {f}" for f in r.failures]
    if r.witness is not None:
        w, v = r.witness
        rep.lines.append(f"witness: m(<{word_str(w)}>) = {to_decimal(v, 15)}")
    if r.transcript is not None:
        t = r.transcript
        reasons = ", ".join(f"{k} {n}" for k, n in sorted(t.reasons.items()))
        rep.transcript.append(f"{t.nodes} nodes, max length {t.max_len}; closed by: {reasons}")
        rep.transcript.append(f"{len(t.justified)} forbidden words justified, {t.minimized} by minimization")
    rep.verdict = r.verdict


def _local_uniqueness(p: Path, rep: RunReport, opts: dict) -> None:
    from .certify.forced import justify_words
    from .certify.region import certify_local_uniqueness, load_dataset, periodic_value
    from .extension import Val
    from .words import transpose_word

    ds = load_dataset(p)
    w = ds.w.word
    rep_words = set(ds.replicating) | {transpose_word(r) for r in ds.replicating}
    just = justify_words([f for f in ds.forbidden if f not in rep_words],
                         Val.of(periodic_value(w) + ds.m_window), ds.alphabet)
    proof = certify_local_uniqueness(w, ds.local_claim, ds.local_window, just.forbidden(),
                                     ds.replicating, node_cap=opts.get("node_cap") or 200_000)
    rep.lines.append(f"w = {word_str(w)}, window {float(ds.local_window):.1e}")
    rep.lines.append(proof.summary())
    bad = proof.replay()
    rep.transcript.append(f"replay: {len(bad)} discrepancies")
    if not proof.passed:
        wit = proof.witness()
        if wit is not None:
            rep.lines.append(f"surviving completion: {format_word(wit.to_sequence())}")
    rep.verdict = "PASS" if proof.passed and not bad else "FAIL"


def cmd_certify(args) -> list[RunReport]:
    opts = {"node_cap": args.node_cap}
    if args.jobs > 1 and len(args.paths) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            return list(ex.map(certify_one, [args.kind] * len(args.paths), args.paths,
                               [opts] * len(args.paths)))
    return [certify_one(args.kind, p, opts) for p in args.paths]


def cmd_mlregion(args) -> RunReport:
    from .certify.region import characterize_ml_region, load_dataset

    p = resolve(args.dataset, "datasets")
    rep = RunReport(f"mlregion {args.dataset}", {args.dataset: digest(p)})
    region = characterize_ml_region(load_dataset(p), certify=args.certified)
    d = args.digits
    rep.lines.append(f"w = {word_str(region.w)}")
    for name, rv in region.values.items():
        line = f"{name} = {_value(rv.value, d, args.exact)}  {format_word(rv.sequence.to_sequence())}"
        if name != "j0":
            line += f"  ({name} - j0 = {float(region.gap(name)):.6e})"
        rep.lines.append(line)
    for x in region.X:
        rep.lines.append(f"{x.name} = {to_decimal(x.value, d)}  {format_word(x.sequence.to_sequence())}"
                         f"  (- j0 = {float(x.exact - region.j0.exact):.6e})")
    just = region.justification
    rep.transcript.append(f"{len(just.justified)} forbidden words justified, "
                          f"{len(just.unjustified)} left out: "
                          + (" ".join(word_str(w) for w in just.unjustified) or "none"))
    if region.local is not None:
        rep.transcript.append("local uniqueness: " + region.local.summary())
    if region.replication is not None:
        for i, pr in enumerate(region.replication.proofs):
            per = "periodic" if region.replication.periodic(i) else "not periodic"
            rep.transcript.append(f"self-replication {i + 1} ({per}): " + pr.summary())
    rep.lines += [f"failure: {f}" for f in region.failures]
    rep.verdict = "PASS" if region.passed else "FAIL"
    return rep


def cmd_dim(args) -> RunReport:
    from .dimension import D_of_t, d_of, dim_gauss_cantor

    mode = "certified" if args.certified else "fast"
    if args.t is not None:
        rep = RunReport(f"dim --t {args.t} --n {args.n} --depth {args.depth} --{mode}")
        est = D_of_t(Fraction(args.t), args.n, args.depth, args.certified)
        rep.lines.append(f"D(t) in {est}")
        rep.lines.append(f"d(t) in {d_of(est)}")
    else:
        if args.fset is None:
            raise UsageError("dim needs a forbidden-set file or --t")
        p = resolve(args.fset, "datasets")
        rep = RunReport(f"dim {args.fset} --depth {args.depth} --{mode}", {args.fset: digest(p)})
        est = dim_gauss_cantor(load_fset(p), args.depth, args.certified)
        rep.lines.append(f"dim_H K in {est}")
        rep.lines.append(f"width {float(est.width):.3e}, depth {est.depth}, {est.states} states")
    if not args.certified:
        rep.transcript.append("fast mode: floating-point roots, not certified")
    return rep


def berstein_table() -> list[tuple[Fraction, Fraction]]:
    rows = []
    for line in (DATA / "berstein.txt").read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].split()
        if line:
            rows.append((Fraction(line[0]), Fraction(line[1])))
    return rows


def cmd_berstein(args) -> RunReport:
    rep = RunReport("berstein")
    for lo, hi in berstein_table():
        rep.lines.append(f"({float(lo):.6f}, {float(hi):.6f})")
    rep.transcript.append("listed as data; these intervals are not checked")
    return rep


# -- entry point ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="markovspec", description="Rigorous Markov and Lagrange spectrum computations.")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes for several certificates")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def numeric(p, digits=20):
        p.add_argument("--digits", type=int, default=digits)
        p.add_argument("--exact", action="store_true", help="also print the exact radical form")

    p = sub.add_parser("eval", help="lambda at the mark of a word")
    p.add_argument("word")
    numeric(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("markov", help="Markov value of a doubly periodic word")
    p.add_argument("word")
    numeric(p)
    p.set_defaults(func=cmd_markov)

    p = sub.add_parser("transitive", help="transitivity of a subshift with witnesses")
    p.add_argument("fset")
    p.add_argument("--cap", type=int, default=None, help="longest connecting word searched")
    p.set_defaults(func=cmd_transitive)

    p = sub.add_parser("extremal", help="largest or least Markov value over a subshift")
    p.add_argument("fset")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--max", dest="direction", action="store_const", const="max")
    g.add_argument("--min", dest="direction", action="store_const", const="min")
    p.add_argument("--required", default=None, help="minimize over sequences containing this word")
    p.add_argument("--node-cap", type=int, default=200_000)
    numeric(p)
    p.set_defaults(func=cmd_extremal, direction="max")

    p = sub.add_parser("certify", help="check certificates")
    p.add_argument("kind", choices=["good-interval", "gap", "local-uniqueness"])
    p.add_argument("paths", nargs="+")
    p.add_argument("--node-cap", type=int, default=None)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("mlregion", help="characterize a region of M minus L")
    p.add_argument("dataset")
    p.add_argument("--certified", action=argparse.BooleanOptionalAction, default=True,
                   help="run the local uniqueness and self-replication searches")
    numeric(p, 30)
    p.set_defaults(func=cmd_mlregion)

    p = sub.add_parser("dim", help="Hausdorff dimension bracket of a Gauss-Cantor set")
    p.add_argument("fset", nargs="?")
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--certified", dest="certified", action="store_true", default=True)
    p.add_argument("--fast", dest="certified", action="store_false")
    p.add_argument("--t", default=None, help="bracket D(t) instead of a given subshift")
    p.add_argument("--n", type=int, default=6, help="approximation order for --t")
    p.set_defaults(func=cmd_dim)

    p = sub.add_parser("berstein", help="print Berstein's table of intervals")
    p.set_defaults(func=cmd_berstein)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        out = args.func(args)
    except (UsageError, FormatError, WordSyntaxError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR
    reports = out if isinstance(out, list) else [out]
    if not isinstance(out, list):
        out.seconds = time.perf_counter() - t0
    print("\n\n".join(r.render() for r in reports))
    return EXIT[_worst(r.verdict for r in reports)]


if __name__ == "__main__":
    sys.exit(main())
