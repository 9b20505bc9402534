"""Dimension brackets at increasing depth, and D(t) on a grid of t.

    python scripts/dimension_table.py --max-depth 9
"""

import argparse
import time
from fractions import Fraction

from markovspec.dimension import SIGMA_A, D_of_t, d_of, dim_gauss_cantor
from markovspec.subshift import ForbiddenSet


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-depth", type=int, default=8)
    ap.add_argument("--n", type=int, default=4, help="approximation order for D(t)")
    ap.add_argument("--t", nargs="*", default=["3.3", "3.5", "3.7", "3.9", "3.94", "4.0", "4.3"])
    args = ap.parse_args()
    for label, f in (("full shift {1,2}", ForbiddenSet.of([], 2)),
                     ("Sigma(A)", ForbiddenSet.of(SIGMA_A, 3))):
        print(label)
        for depth in range(2, args.max_depth + 1):
            t0 = time.perf_counter()
            est = dim_gauss_cantor(f, depth)
            print(f"  depth {depth}: {est}  width {float(est.width):.2e}  "
                  f"{est.states} states  {time.perf_counter() - t0:.1f}s")
    print(f"D(t) with n = {args.n}, depth 5")
    for t in args.t:
        est = D_of_t(Fraction(t), args.n, 5)
        print(f"  t = {t}: D in {est}, d in {d_of(est)}")


if __name__ == "__main__":
    main()
