"""Sample random eventually periodic sequences and check none lands inside a certified gap.

Two kinds of samples: uniform doubly periodic words over the alphabet, and
endpoint words with one or two digits changed (these land near the gap).

    python scripts/gap_sampling.py --samples 100000 gap1.cert gap2.cert gap3.cert
"""

import argparse
import random
import time

from markovspec.certify import check_gap, load_gap_certificate
from markovspec.extension import Val
from markovspec.markov import markov_value_dp
from markovspec.words import DoublyPeriodicWord


def uniform(rng: random.Random, alphabet: int) -> DoublyPeriodicWord:
    word = lambda n: tuple(rng.randint(1, alphabet) for _ in range(n))
    return DoublyPeriodicWord(word(rng.randint(1, 8)), word(rng.randint(0, 12)), word(rng.randint(1, 8)))


def perturbed(rng: random.Random, base: DoublyPeriodicWord, alphabet: int) -> DoublyPeriodicWord:
    u = list(base.unroll(-2 * len(base.p1), len(base.tau) + 2 * len(base.p2)))
    for _ in range(rng.randint(1, 2)):
        u[rng.randrange(len(u))] = rng.randint(1, alphabet)
    return DoublyPeriodicWord(base.p1, tuple(u), base.p2)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("certs", nargs="+")
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for name in args.certs:
        cert = load_gap_certificate(name)
        rep = check_gap(cert)
        print(f"{name}: certificate {rep.verdict}")
        lo, hi = Val.of(rep.nu_value.lower), Val.of(rep.mu_value.lower)
        rng = random.Random(args.seed)
        t0, inside, nearest = time.perf_counter(), [], None
        for i in range(args.samples):
            kind = i % 3
            if kind == 0 or not isinstance(cert.nu, DoublyPeriodicWord):
                w = uniform(rng, cert.alphabet)
            else:
                w = perturbed(rng, cert.nu if kind == 1 else cert.mu, cert.alphabet)
            v = markov_value_dp(w)[0].lower
            if lo < Val.of(v) < hi:
                inside.append(w)
            d = min(abs(float(v - rep.nu_value.lower)), abs(float(v - rep.mu_value.lower)))
            if d > 0 and (nearest is None or d < nearest):
                nearest = d
        dt = time.perf_counter() - t0
        print(f"  {args.samples} samples in {dt:.0f}s, {len(inside)} inside the gap, "
              f"closest distinct value {nearest:.3e} from an endpoint")
        for w in inside[:5]:
            print("  inside:", w)


if __name__ == "__main__":
    main()
