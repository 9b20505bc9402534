"""Independent brute-force references used by the tests.

Nothing here imports the package's arithmetic: continued fractions are
summed with plain Fractions and graphs are searched with hand-written BFS.
"""

from fractions import Fraction
from itertools import product


def cf_value(digits) -> Fraction:
    """[d0; d1, ..., dn] for a finite list."""
    x = Fraction(digits[-1])
    for d in reversed(digits[:-1]):
        x = d + 1 / x
    return x


def cf_bounds(digits) -> tuple[Fraction, Fraction]:
    """Bounds for every infinite continuation: the last two convergents."""
    a, b = cf_value(digits), cf_value(digits[:-1])
    return min(a, b), max(a, b)


def lam_bounds(digit, j: int, depth: int = 60) -> tuple[Fraction, Fraction]:
    """Bounds on lambda_j of the sequence i -> digit(i)."""
    right = [digit(j + k) for k in range(depth)]
    left = [0] + [digit(j - k) for k in range(1, depth)]
    r0, r1 = cf_bounds(right)
    l0, l1 = cf_bounds(left)
    return r0 + l0, r1 + l1


def brute_markov(dp, depth: int = 60, periods: int = 3, far: int = 60) -> tuple[Fraction, Fraction]:
    """Max of lambda_j bounds over three unrolled periods each side of tau.

    Positions `far` periods out are included as well: a supremum reached only
    along a periodic tail is approached there to well below 1e-20.
    """
    n1, n2, nt = len(dp.p1), len(dp.p2), len(dp.tau)
    js = list(range(-periods * n1, nt + periods * n2))
    js += [-far * n1 - k for k in range(n1)] + [nt + far * n2 + k for k in range(n2)]
    best = None
    for j in js:
        lo, hi = lam_bounds(dp.digit, j, depth)
        best = (lo, hi) if best is None else (max(best[0], lo), max(best[1], hi))
    return best


def is_palindrome(w) -> bool:
    return list(w) == list(reversed(w))


def semi_symmetric(w) -> bool:
    w = list(w)
    return any(is_palindrome(w[:k]) and is_palindrome(w[k:]) for k in range(len(w) + 1))


def contains(w, f) -> bool:
    s = "".join(map(str, w))
    return any("".join(map(str, x)) in s for x in f)


def essential_graph(forbidden, alphabet: int):
    """Admissible words of length L-1 and their one-step overlaps, pruned of
    nodes that cannot lie on a bi-infinite path."""
    L = max([len(w) for w in forbidden] + [2])
    nodes = {u for u in product(range(1, alphabet + 1), repeat=L - 1) if not contains(u, forbidden)}
    edges = {u: {u[1:] + (d,) for d in range(1, alphabet + 1)
                 if not contains(u + (d,), forbidden) and u[1:] + (d,) in nodes} for u in nodes}
    while True:
        has_in = {v for u in nodes for v in edges[u] if v in nodes}
        keep = {u for u in nodes if u in has_in and any(v in nodes for v in edges[u])}
        if keep == nodes:
            break
        nodes = keep
    return nodes, {u: {v for v in edges[u] if v in nodes} for u in nodes}


def reachable(edges, start) -> set:
    seen, stack = {start}, [start]
    while stack:
        for v in edges[stack.pop()]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def brute_transitive(forbidden, alphabet: int) -> bool | None:
    """Pairwise reachability on the essential graph; None for an empty subshift."""
    nodes, edges = essential_graph(forbidden, alphabet)
    if not nodes:
        return None
    return all(reachable(edges, u) >= nodes for u in nodes)


def q_n(word) -> int:
    """Denominator of [0; word]."""
    q0, q1 = 1, 0
    for a in word:
        q0, q1 = a * q0 + q1, q0
    return q0


def full_shift_dimension(alphabet: int, n: int) -> float:
    """Root s of Z_{n+1}(s) = Z_n(s), where Z_n(s) sums q_n(w)^(-2s) over all words of length n."""
    import numpy as np
    from scipy.optimize import brentq

    def denominators(k):
        q0, q1 = np.ones(1), np.zeros(1)
        for _ in range(k):
            q0, q1 = (np.concatenate([a * q0 + q1 for a in range(1, alphabet + 1)]),
                      np.concatenate([q0] * alphabet))
        return q0

    qa, qb = denominators(n), denominators(n + 1)
    return brentq(lambda s: np.log(np.sum(qb ** (-2 * s))) - np.log(np.sum(qa ** (-2 * s))),
                  0.01, 1.0, xtol=1e-14)
