"""Characterize both bundled regions of M minus L and print every stage.

    python scripts/region_report.py
"""

import time

from markovspec.certify import characterize_ml_region, load_dataset
from markovspec.cf import to_decimal
from markovspec.words import format_word, word_str


def report(name: str, certify: bool) -> None:
    t0 = time.perf_counter()
    r = characterize_ml_region(load_dataset(name), certify=certify)
    print(f"{name}: w = {word_str(r.w)}  {'PASS' if r.passed else 'FAIL'}  ({time.perf_counter() - t0:.1f}s)")
    for key, v in r.values.items():
        gap = "" if key == "j0" else f"  {key} - j0 = {float(r.gap(key)):.6e}"
        print(f"  {key} = {to_decimal(v.value, 30)}{gap}")
    for x in r.X:
        print(f"  {x.name}: {format_word(x.sequence.to_sequence())}  - j0 = {float(x.exact - r.j0.exact):.6e}")
    j = r.justification
    print(f"  forbidden words justified: {len(j.justified)}, left out: "
          + (" ".join(word_str(w) for w in j.unjustified) or "none"))
    if r.local is not None:
        print("  local uniqueness:", r.local.summary())
    if r.replication is not None:
        for i, p in enumerate(r.replication.proofs):
            print(f"  self-replication {i + 1}:", p.summary())
    for f in r.failures:
        print("  failure:", f)


def main() -> None:
    for name in ("w3942.toml", "w3938.toml"):
        report(name, certify=True)


if __name__ == "__main__":
    main()
