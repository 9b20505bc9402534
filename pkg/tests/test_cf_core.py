import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from markovspec.cf import (Ordering, bound_all_extensions, compare, convergents, cylinder_size,
                           enclose_cf, eval_eventually_periodic, eval_periodic, lambda0, lambda_at,
                           to_decimal)
from markovspec.exact import QuadIrr, RadicalSum, RatInterval
from markovspec.markov import lambda_dp, markov_value_dp, simplify_dp
from markovspec.words import (DoublyPeriodicWord, Free, MarkedWord, Periodic, WordSyntaxError,
                              format_word, is_semi_symmetric, parse_word, transpose, transpose_word)

from oracles import brute_markov, cf_bounds, cf_value, lam_bounds, semi_symmetric

digits3 = st.integers(1, 3)
words3 = st.lists(digits3, min_size=1, max_size=8).map(tuple)


def sqrt(n: int) -> RadicalSum:
    return RadicalSum.of(QuadIrr.make(0, 1, 1, n))


# -- exact arithmetic ------------------------------------------------------------

def test_quadirr_canonical_form():
    q = QuadIrr.make(2, 4, -6, 8)  # (2 + 4*sqrt 8) / -6 = (-1 - 4*sqrt 2) / 3
    assert (q.a, q.b, q.c, q.d) == (-1, -4, 3, 2)
    assert QuadIrr.make(3, 2, 1, 9).is_rational  # sqrt 9 folds into the rational part
    assert QuadIrr.make(3, 2, 1, 9) == QuadIrr.rational(9)


def test_radical_sum_identities():
    assert (sqrt(8) - sqrt(2) - sqrt(2)).is_zero
    assert sqrt(2) + sqrt(3) > Fraction(314, 100)
    assert (sqrt(5) - sqrt(5)).sign() == 0


@given(st.integers(-50, 50), st.integers(-50, 50), st.integers(1, 30), st.integers(2, 60))
def test_enclosures_nest_and_contain_the_value(a, b, c, d):
    x = RadicalSum.of(QuadIrr.make(a, b, c, d))
    prev = None
    for bits in (16, 64, 256, 1024):
        enc = x.enclosure(bits)
        assert enc.lo <= x <= enc.hi
        if prev is not None:
            assert enc in prev
        prev = enc
    assert float(x) == pytest.approx((a + b * math.sqrt(d)) / c, rel=1e-12, abs=1e-12)


def test_rat_interval_rejects_empty():
    with pytest.raises(ValueError):
        RatInterval(Fraction(1), Fraction(0))


# -- words -------------------------------------------------------------------------

def test_parse_examples():
    s = parse_word("<12>3*113<21>", 3)
    assert s.left == Periodic((2, 1)) and s.right == Periodic((2, 1))
    assert s.middle == (3, 1, 1, 3) and s.mark == 0
    p = parse_word("<1*>", 3)
    assert p.is_doubly_periodic and p.marked_digit == 1
    f = parse_word("<121313>22344*3211<313121>", 4)
    assert f.marked_digit == 4 and format_word(f) == "<121313>22344*3211<313121>"


@pytest.mark.parametrize("text, offset", [("12*3*4", 4), ("1234", 0), ("<12", 0), ("1*2>", 3)])
def test_parse_errors_report_offsets(text, offset):
    with pytest.raises(WordSyntaxError) as e:
        parse_word(text, 4)
    assert e.value.offset == offset


def test_parse_rejects_digit_outside_alphabet():
    with pytest.raises(WordSyntaxError):
        parse_word("13*", 2)


@given(st.lists(st.integers(1, 4), min_size=1, max_size=6), words3, st.lists(digits3, min_size=1, max_size=6),
       words3, st.data())
def test_format_parse_round_trip(left, mid, right, rpad, data):
    mark = data.draw(st.integers(0, len(mid) - 1))
    m = "".join(map(str, mid))
    text = f"<{''.join(map(str, left))}>{m[:mark + 1]}*{m[mark + 1:]}{''.join(map(str, rpad))}" \
           f"<{''.join(map(str, right))}>"
    s = parse_word(text, 4)
    assert parse_word(format_word(s), 4) == s


def test_transpose_examples():
    assert transpose((1, 2, 3)) == (3, 2, 1)
    w = tuple(map(int, "12111233311133232"))
    assert transpose(transpose(w)) == w
    mw = MarkedWord.parse("12*3", 3)
    assert mw.transpose() == MarkedWord((3, 2, 1), 1, 3)


@given(words3, st.data())
def test_transpose_is_an_involution_and_preserves_lambda(w, data):
    mark = data.draw(st.integers(0, len(w) - 1))
    p = data.draw(words3)
    q = data.draw(words3)
    s = parse_word(f"<{''.join(map(str, p))}>" + "".join(map(str, w[:mark + 1])) + "*"
                   + "".join(map(str, w[mark + 1:])) + f"<{''.join(map(str, q))}>", 3)
    assert s.transpose().transpose() == s
    a, b = lambda0(s), lambda0(s.transpose())
    assert a.lower == b.lower and a.upper == b.upper


@pytest.mark.parametrize("word, expected", [("2111", True), ("1221", True), ("12111233311133232", False)])
def test_semi_symmetric_examples(word, expected):
    assert is_semi_symmetric(tuple(map(int, word))) is expected
    assert semi_symmetric(tuple(map(int, word))) is expected


@given(st.lists(st.integers(1, 3), min_size=0, max_size=10))
def test_semi_symmetric_matches_split_oracle(w):
    assert is_semi_symmetric(tuple(w)) == semi_symmetric(w)


# -- continued fractions --------------------------------------------------------------

def test_convergent_examples():
    assert convergents([1]) == [(1, 1)]
    assert convergents([1, 1, 1, 1, 1]) == [(1, 1), (1, 2), (2, 3), (3, 5), (5, 8)]
    assert convergents([2, 2], with_integer_part=True) == [(2, 1), (5, 2)]


def test_cylinder_size_examples():
    assert cylinder_size([1]) == Fraction(1, 2)
    assert cylinder_size([2]) == Fraction(1, 6)


@given(st.lists(digits3, min_size=1, max_size=6), st.lists(digits3, min_size=1, max_size=6))
def test_cylinder_size_is_submultiplicative_up_to_two(a, b):
    prod = cylinder_size(a) * cylinder_size(b)
    assert prod / 2 < cylinder_size(a + b) < 2 * prod


@given(st.lists(digits3, min_size=1, max_size=8), words3)
def test_convergents_sandwich_every_completion(prefix, period):
    # exact value of [0; prefix, period^inf] lies between the last two convergents
    x = RadicalSum.of(eval_eventually_periodic(tuple(prefix), period))
    cs = convergents(prefix)
    p1, q1 = cs[-1]
    p0, q0 = cs[-2] if len(cs) > 1 else (0, 1)
    lo, hi = sorted((Fraction(p1, q1), Fraction(p0, q0)))
    assert lo <= x <= hi


def test_enclose_golden_ratio():
    phi = (sqrt(5) - 1).scale(Fraction(1, 2))
    enc = enclose_cf((), Periodic((1,)), depth=200)
    assert phi in enc and enc.width < Fraction(1, 10**30)


def test_enclose_eventually_periodic_tail():
    exact = 3 + RadicalSum.of(eval_eventually_periodic((1, 3), (3, 1)))
    enc = enclose_cf((3, 1, 3), Periodic((3, 1)))
    assert exact in enc
    lam = exact + RadicalSum.of(eval_periodic((3, 1)))
    assert lam > Fraction(402, 100)


def test_enclose_free_tail_holds_all_completions():
    # every length-12 prefix over {1,2}, closed off by each periodic tail over {1,2}
    enc = enclose_cf((2,), Free(2))
    for k in range(2 ** 12):
        tail = tuple(1 + ((k >> i) & 1) for i in range(12))
        for per in ((1,), (2,), (1, 2), (2, 1)):
            assert 2 + RadicalSum.of(eval_eventually_periodic(tail, per)) in enc
    for per in ((1, 2), (2, 1)):
        assert 2 + RadicalSum.of(eval_periodic(per)) in enc


def test_eval_periodic_examples():
    assert RadicalSum.of(eval_periodic((1,))) == (sqrt(5) - 1).scale(Fraction(1, 2))
    assert RadicalSum.of(eval_periodic((2,))) == sqrt(2) - 1
    # x = [0; 1, 2, x] solves x = (2 + x) / (3 + x), i.e. x^2 + 2x - 2 = 0
    x = eval_periodic((1, 2))
    assert RadicalSum.of(x) == sqrt(3) - 1
    assert abs(float(x) ** 2 + 2 * float(x) - 2) < 1e-12


@given(st.lists(st.integers(1, 4), min_size=1, max_size=6))
def test_eval_periodic_is_a_fixed_point(period):
    x = RadicalSum.of(eval_periodic(tuple(period)))
    lo, hi = cf_bounds([0] + list(period) * (40 // len(period) + 2))
    assert lo <= x <= hi


@given(st.lists(digits3, min_size=1, max_size=8), st.integers(0, 40))
def test_enclosure_soundness_and_nesting(period, extra):
    exact = RadicalSum.of(eval_periodic(tuple(period)))
    prev = None
    for depth in (8 + extra, 32 + extra, 128 + extra):
        enc = enclose_cf((), Periodic(tuple(period)), depth)
        assert exact in enc
        if prev is not None:
            assert enc in prev
        prev = enc


@given(st.lists(digits3, min_size=2, max_size=12), words3, words3)
def test_agreement_depth_bound(prefix, t1, t2):
    a = RadicalSum.of(eval_eventually_periodic(tuple(prefix), t1))
    b = RadicalSum.of(eval_eventually_periodic(tuple(prefix), t2))
    n = len(prefix)
    assert abs(float(a - b)) <= 2.0 ** (1 - n)
    assert (a - b) - Fraction(2) ** (1 - n) < 0 and (a - b) + Fraction(2) ** (1 - n) > 0


def test_lambda_examples():
    assert lambda0(parse_word("<1*>")).exact == sqrt(5)
    assert lambda0(parse_word("<2*>")).exact == sqrt(8)
    assert to_decimal(lambda0(parse_word("<1*>")), 8) == "2.2360679…"
    assert to_decimal(lambda0(parse_word("<2*>")), 8) == "2.8284271…"


@given(words3, words3, words3, st.data())
def test_lambda_at_is_lambda0_of_the_shift(p, mid, q, data):
    mark = data.draw(st.integers(0, len(mid) - 1))
    s = parse_word(f"<{''.join(map(str, p))}>" + "".join(map(str, mid[:mark + 1])) + "*"
                   + "".join(map(str, mid[mark + 1:])) + f"<{''.join(map(str, q))}>", 3)
    for j in range(-3, 4):
        a, b = lambda_at(s, j), lambda0(s.shift(j))
        assert a.lower == b.lower and a.upper == b.upper


def test_compare_examples():
    assert compare(markov_value_dp("<1*>")[0], 3) is Ordering.LESS
    lo = bound_all_extensions(MarkedWord.parse("13*1", 3), 3).lo
    assert compare(RadicalSum.of(lo), Fraction(411, 100)) is Ordering.GREATER
    v = markov_value_dp("<12>3*113<21>")[0]
    assert compare(v, v) is Ordering.EQUAL


def test_bound_all_extensions_examples():
    assert bound_all_extensions(MarkedWord.parse("1222*122", 2), 2).lo > Fraction(31216, 10000)
    assert bound_all_extensions(MarkedWord.parse("3*13", 3), 3).lo > Fraction(402, 100)
    enc = bound_all_extensions(MarkedWord.parse("1*", 1), 1)
    assert sqrt(5) in enc and enc.width < Fraction(1, 10**15)


def test_bound_all_extensions_holds_sampled_extensions():
    rng = random.Random(11)
    for _ in range(200):
        w = [rng.randint(1, 3) for _ in range(rng.randint(1, 6))]
        j = rng.randrange(len(w))
        enc = bound_all_extensions(MarkedWord(tuple(w), j, 3), 3)
        left = [rng.randint(1, 3) for _ in range(40)]
        right = [rng.randint(1, 3) for _ in range(40)]
        seq = left[::-1] + w + right
        k = len(left) + j
        r_lo, r_hi = cf_bounds(seq[k:])
        l_lo, l_hi = cf_bounds([0] + seq[:k][::-1])
        assert enc.lo <= r_lo + l_lo and r_hi + l_hi <= enc.hi


def test_to_decimal_truncates_and_marks_inexact():
    assert to_decimal(RadicalSum.of(Fraction(23, 5)), 6) == "4.60000"
    assert to_decimal(RadicalSum.of(Fraction(1, 3)), 4) == "0.3333…"
    assert to_decimal(sqrt(5), 5) == "2.2360…"


# -- Markov values of doubly periodic words -----------------------------------------------

def dp(p1, tau, p2, mark=0):
    f = lambda s: tuple(map(int, s))
    return DoublyPeriodicWord(f(p1), f(tau), f(p2), mark)


def unrolled(w: DoublyPeriodicWord, n: int = 30):
    return tuple(w.digit(w.mark + k) for k in range(-n, n + 1))


def test_simplify_examples():
    s = simplify_dp(dp("1212", "", "1212"))
    assert s.is_purely_periodic and s.p1 == (1, 2)
    s = simplify_dp(dp("12", "13", "21"))
    assert (s.p1, s.tau, s.p2) == ((2, 1), (3,), (2, 1))
    # 1212 2 1212: the trailing 2 of tau is absorbed on the right
    w = dp("12", "2", "12")
    s = simplify_dp(w)
    assert s.p1 == (1, 2) and s.tau == () and unrolled(s) == unrolled(w)


@given(words3, st.lists(digits3, max_size=6).map(tuple), words3, st.integers(-4, 10))
def test_simplify_preserves_the_digit_stream(p1, tau, p2, mark):
    w = DoublyPeriodicWord(p1, tau, p2, mark)
    assert unrolled(simplify_dp(w)) == unrolled(w)


@pytest.mark.parametrize("text, prefix", [
    ("<1*>", "2.2360679"),
    ("<12>3*113<21>", "3.930691"),
    ("<121212212*121>", "3.42339101"),
    ("<1112*12>", "3.35871"),
    ("<1222*12212221>", "3.122183"),
])
def test_markov_value_examples(text, prefix):
    v, pos = markov_value_dp(text)
    assert v.is_exact and to_decimal(v, 20).startswith(prefix)


def random_dp(rng: random.Random) -> DoublyPeriodicWord:
    word = lambda n: tuple(rng.randint(1, 3) for _ in range(n))
    return DoublyPeriodicWord(word(rng.randint(1, 8)), word(rng.randint(0, 6)), word(rng.randint(1, 8)))


def test_markov_value_matches_brute_force_scan():
    rng = random.Random(2024)
    for _ in range(40):
        w = random_dp(rng)
        v, pos = markov_value_dp(w)
        lo, hi = brute_markov(w)
        assert hi - lo < Fraction(1, 10**20)
        assert RatInterval(lo, hi).overlaps(v.enclosure)
        if pos is not None:
            # the witness attains the maximum
            j_lo, j_hi = lam_bounds(w.digit, pos)
            assert j_lo <= v.lower <= j_hi


def test_markov_position_refers_to_the_given_word():
    # tau starts with digits that simplification absorbs into the left period
    w = DoublyPeriodicWord.from_sequence(parse_word("<12111233311133232>1*21111121111121<23233111333211121>", 3))
    v, pos = markov_value_dp(w)
    assert lambda_dp(w, pos) == v.lower


@given(words3, st.lists(digits3, max_size=6).map(tuple), words3)
def test_markov_value_is_transpose_invariant(p1, tau, p2):
    w = DoublyPeriodicWord(p1, tau, p2)
    t = DoublyPeriodicWord(transpose_word(p2), transpose_word(tau), transpose_word(p1))
    assert markov_value_dp(w)[0].lower == markov_value_dp(t)[0].lower


def test_cf_value_oracle_sanity():
    assert cf_value([1, 1, 1]) == Fraction(3, 2)
