"""Mutate good-interval certificates one item at a time and report which check catches each.

Mutations: every digit change and drop of a B or C word, every obligation
dropped, and every obligation tightened just past its certified margin.

    python scripts/mutation_study.py 3_05-3_12.cert 3_35-3_42.cert
"""

import argparse
import time
from fractions import Fraction

from markovspec.certify import certify_good_interval, verify_inequality
from markovspec.certify.extremal import markov_of
from markovspec.certify.good_interval import DATA, parse_certificate


def mutations(text: str, alphabet: int):
    lines = text.splitlines()
    section = None
    for i, line in enumerate(lines):
        body = line.split("#", 1)[0].strip()
        if body.startswith("["):
            section = body
            continue
        if not body:
            continue
        if section in ("[B]", "[C]"):
            words = body.split()
            for j, w in enumerate(words):
                for k in range(len(w)):
                    for d in map(str, range(1, alphabet + 1)):
                        if d != w[k]:
                            new = words[:j] + [w[:k] + d + w[k + 1:]] + words[j + 1:]
                            yield f"{section} {w} -> {new[j]}", lines[:i] + [" ".join(new)] + lines[i + 1:], None
                yield f"{section} drop {w}", lines[:i] + [" ".join(words[:j] + words[j + 1:])] + lines[i + 1:], None
        elif section == "[obligation]":
            yield f"drop '{body}'", lines[:i] + lines[i + 1:], None
            yield f"tighten '{body}'", lines, i + 1


def tighten(cert, lineno: int) -> None:
    names = {"x": markov_of(cert.x), "y": markov_of(cert.y)}
    for case in cert.cases:
        for idx, o in enumerate(case.obligations):
            if o.label == f"line {lineno}":
                r = verify_inequality(o, names, cert.C)
                delta = r.margin.hi + Fraction(1, 10 ** 40)
                case.obligations[idx] = o.negated_threshold(delta if o.lower else -delta)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("certs", nargs="+")
    args = ap.parse_args()
    for name in args.certs:
        text = (DATA / name).read_text()
        base = parse_certificate(text, name)
        print(f"{name}: unmutated {certify_good_interval(base).verdict}")
        survived = 0
        for label, lines, line_no in mutations(text, base.alphabet):
            t0 = time.perf_counter()
            try:
                cert = parse_certificate("\n".join(lines), name)
                if line_no is not None:
                    tighten(cert, line_no)
                rep = certify_good_interval(cert)
                verdict, first = rep.verdict, rep.first_failure()
                caught = first.check if first else "-"
            except ValueError as e:
                verdict, caught = "FAIL", f"rejected: {e}"
            survived += verdict == "PASS"
            print(f"  {label:40s} {verdict:5s} {caught}  ({time.perf_counter() - t0:.1f}s)", flush=True)
        print(f"  {survived} mutation(s) survived")


if __name__ == "__main__":
    main()
