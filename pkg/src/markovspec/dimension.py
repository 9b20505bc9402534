"""Hausdorff dimension brackets for Gauss-Cantor sets of subshifts of finite type.

K(Sigma) is the set of [0; a_1, a_2, ...] with a in the one-sided shift.  Its
dimension is the zero of the pressure of -s log|T'| for the Gauss map T, and
|T'(x)| = (a_1 + y)^2 with y = [0; a_2, a_3, ...].  On the sliding-block graph
of admissible words u of length `depth`, the factor for the first digit of u
is pinned between its values at the least and greatest admissible y following
u (exact extremal tails), giving two weighted matrices whose spectral radii
bound exp(pressure) from below and above.  Each matrix's spectral radius is
certified against 1 by a Collatz-Wielandt ratio check in interval arithmetic
on a numerically computed Perron vector; the pressure of a reducible system
is the maximum over its strongly connected components.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import networkx as nx
import numpy as np
from mpmath import iv
from scipy.optimize import brentq
from scipy.sparse import csr_matrix

from .extension import Engine, engine_for
from .subshift import ForbiddenSet, Subshift, approx_sigma_t, normalize
from .words import Word

IV_DPS = 30
GRID = 10**9  # certified endpoints are multiples of 1/GRID


@dataclass(frozen=True)
class DimensionEstimate:
    lower: Fraction
    upper: Fraction
    depth: int
    subshift: ForbiddenSet | None = None
    states: int = 0
    certified: bool = True

    def __post_init__(self):
        if not 0 <= self.lower <= self.upper <= 1:
            raise ValueError(f"invalid bracket [{self.lower}, {self.upper}]")

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def contains(self, x) -> bool:
        x = Fraction(str(x)) if isinstance(x, float) else Fraction(x)
        return self.lower <= x <= self.upper

    def __str__(self) -> str:
        tag = "" if self.certified else " (not certified)"
        return f"[{float(self.lower):.10f}, {float(self.upper):.10f}]{tag}"


@dataclass
class _Component:
    digits: np.ndarray      # first digit of each state
    y_lo: list[int]         # scaled enclosure ends of the admissible y range
    y_hi: list[int]
    succ: list[list[int]]   # successor indices inside the component
    bits: int
    adj: csr_matrix | None = None

    def __post_init__(self):
        rows = [k for k, js in enumerate(self.succ) for _ in js]
        cols = [j for js in self.succ for j in js]
        n = len(self.succ)
        self.adj = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))

    def weights(self, s: float, upper: bool) -> np.ndarray:
        y = np.array([(lo if upper else hi) / 2.0 ** self.bits for lo, hi in zip(self.y_lo, self.y_hi)])
        return (self.digits + y) ** (-2.0 * s)

    def matvec(self, w: np.ndarray, v: np.ndarray) -> np.ndarray:
        return w * (self.adj @ v)


def _components(eng: Engine, depth: int) -> tuple[list[_Component], int]:
    A = eng.alphabet
    states: list[Word] = []
    frontier: list[Word] = [()]
    for _ in range(depth):
        frontier = [u + (d,) for u in frontier for d in range(1, A + 1) if eng.states(u + (d,)) is not None]
    states = frontier
    index = {u: i for i, u in enumerate(states)}
    g = nx.DiGraph()
    g.add_nodes_from(range(len(states)))
    for u in states:
        for d in range(1, A + 1):
            v = u[1:] + (d,)
            if v in index and eng.states(u + (d,)) is not None:
                g.add_edge(index[u], index[v])
    comps = []
    for scc in nx.strongly_connected_components(g):
        nodes = sorted(scc)
        if len(nodes) == 1 and not g.has_edge(nodes[0], nodes[0]):
            continue
        local = {n: k for k, n in enumerate(nodes)}
        y_lo, y_hi = [], []
        for n in nodes:
            u = states[n]
            st = eng.states(u)
            y_lo.append(eng.side(u[1:], st[0], least=True).lo)
            y_hi.append(eng.side(u[1:], st[0], least=False).hi)
        succ = [[local[m] for m in g.successors(n) if m in local] for n in nodes]
        comps.append(_Component(np.array([states[n][0] for n in nodes], dtype=float),
                                y_lo, y_hi, succ, eng.bits))
    return comps, len(states)


def _perron(c: _Component, w: np.ndarray, iters: int = 20_000, tol: float = 1e-15) -> tuple[float, np.ndarray]:
    """Spectral radius and positive eigenvector by power iteration on M + I."""
    v = np.ones(len(w))
    rho = 0.0
    for _ in range(iters):
        mv = c.matvec(w, v)
        nv = mv + v
        nv /= nv.max()
        done = np.max(np.abs(nv - v)) < tol
        v = nv
        if done:
            break
    mv = c.matvec(w, v)
    rho = float(np.max(mv / v))
    return rho, v


def _log_rho(c: _Component, s: float, upper: bool) -> float:
    return float(np.log(_perron(c, c.weights(s, upper))[0]))


def _iv_weights(c: _Component, s: Fraction, upper: bool) -> list:
    sv = iv.mpf(s.numerator) / s.denominator
    scale = iv.mpf(2) ** (-c.bits)
    out = []
    for a, lo, hi in zip(c.digits, c.y_lo, c.y_hi):
        y = iv.mpf(lo if upper else hi) * scale
        out.append(iv.exp(-2 * sv * iv.log(int(a) + y)))
    return out


def _cw_check(c: _Component, s: Fraction, upper: bool) -> bool:
    """Certify rho(M_hi(s)) <= 1 (upper) or rho(M_lo(s)) >= 1 (lower)."""
    _, v = _perron(c, c.weights(float(s), upper))
    saved, iv.dps = iv.dps, IV_DPS
    try:
        w = _iv_weights(c, s, upper)
        vv = [iv.mpf(float(x)) for x in v]
        for k, js in enumerate(c.succ):
            total = iv.mpf(0)
            for j in js:
                total += vv[j]
            r = w[k] * total / vv[k]
            if upper and not r.b <= 1:
                return False
            if not upper and not r.a >= 1:
                return False
    finally:
        iv.dps = saved
    return True


def _root(c: _Component, upper: bool) -> float:
    f0 = _log_rho(c, 0.0, upper)
    if f0 <= 0:
        return 0.0
    return brentq(lambda s: _log_rho(c, s, upper), 0.0, 1.0, xtol=1e-13)


def _certify_end(c: _Component, guess: float, upper: bool) -> Fraction:
    step = Fraction(1, GRID)
    if upper:
        s = Fraction(int(np.ceil(guess * GRID)), GRID)
        while s < 1 and not _cw_check(c, s, True):
            s, step = min(Fraction(1), s + step), step * 2
        return min(s, Fraction(1))
    s = Fraction(int(np.floor(guess * GRID)), GRID)
    while s > 0 and not _cw_check(c, s, False):
        s, step = max(Fraction(0), s - step), step * 2
    return max(s, Fraction(0))


def dim_gauss_cantor(s: Subshift | ForbiddenSet, depth: int = 8, certified: bool = True) -> DimensionEstimate:
    """Bracket dim_H K(Sigma) using admissible words of length depth.

    The depth is raised to one less than the longest forbidden word if
    needed; the estimate records the depth used.

    With certified=False the bracket is the pair of floating-point roots
    (fast, for exploration only).
    """
    f = normalize(s.forbidden if isinstance(s, Subshift) else s)
    if depth < 1:
        raise ValueError("depth must be positive")
    # shorter states would let walks contain long forbidden words: a larger
    # subshift, which still bounds from above but not from below
    depth = max(depth, f.max_len - 1)
    eng = engine_for(f)
    if not eng.aut.essential:
        # an empty subshift has an empty Gauss-Cantor set
        return DimensionEstimate(Fraction(0), Fraction(0), depth, f, 0, certified)
    comps, n = _components(eng, depth)
    lo = hi = Fraction(0)
    for c in comps:
        g_lo, g_hi = _root(c, False), _root(c, True)
        if certified:
            c_lo, c_hi = _certify_end(c, g_lo, False), _certify_end(c, g_hi, True)
        else:
            c_lo, c_hi = Fraction(g_lo), Fraction(g_hi)
        lo, hi = max(lo, c_lo), max(hi, c_hi)
    return DimensionEstimate(lo, max(lo, hi), depth, f, n, certified)


def D_of_t(t, n: int, depth: int = 8, certified: bool = True, alphabet: int | None = None) -> DimensionEstimate:
    """Bracket D(t) between the inner approximation Sigma(F(n, t - 2^(1-n))) and
    the outer one Sigma(F(n, t)) of the set of sequences with every lambda <= t."""
    t = Fraction(t)
    if t * t < 5:
        return DimensionEstimate(Fraction(0), Fraction(0), depth, None, 0, certified)
    A = alphabet or _alphabet_for(t)
    outer = approx_sigma_t(t, n, A, minimal=True)
    upper = dim_gauss_cantor(outer, depth, certified).upper
    t_in = t - Fraction(2, 2**n)
    lower = Fraction(0)
    if t_in * t_in >= 5:
        inner = approx_sigma_t(t_in, n, A, minimal=True)
        lower = dim_gauss_cantor(inner, depth, certified).lower
    return DimensionEstimate(min(lower, upper), upper, depth, outer, 0, certified)


def _alphabet_for(t: Fraction) -> int:
    # a digit a forces lambda >= a, so digits up to floor(t) suffice
    return max(1, int(t))


def d_of(D: DimensionEstimate) -> DimensionEstimate:
    """Image of the bracket under x -> min(1, 2x)."""
    return DimensionEstimate(min(Fraction(1), 2 * D.lower), min(Fraction(1), 2 * D.upper), D.depth,
                             D.subshift, D.states, D.certified)


SIGMA_A = ["131", "312", "313", "1323", "1322", "21132", "13211", "11132", "3111333"]


__all__ = ["DimensionEstimate", "D_of_t", "SIGMA_A", "d_of", "dim_gauss_cantor"]
