import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from markovspec.certify.good_interval import subshift_included
from markovspec.markov import periodic_markov
from markovspec.subshift import (EmptySubshiftError, ForbiddenSet, FormatError, Subshift, approx_sigma_t,
                                 avoids, avoids_periodic, block_graph, connect_witnesses, dump_fset,
                                 is_transitive, normalize, parse_fset)
from markovspec.words import as_word, transpose_word

from oracles import brute_transitive, contains

w = as_word
word_sets = st.integers(1, 3).flatmap(
    lambda A: st.tuples(st.just(A), st.lists(st.lists(st.integers(1, A), min_size=1, max_size=5).map(tuple),
                                             min_size=0, max_size=5)))


def random_set(rng: random.Random, A: int, max_len: int = 5) -> list[tuple[int, ...]]:
    return [tuple(rng.randint(1, A) for _ in range(rng.randint(1, max_len))) for _ in range(rng.randint(0, 5))]


# -- normalize / avoids ----------------------------------------------------------------

def test_normalize_examples():
    assert ForbiddenSet.of(["121"], 2).words == {w("121")}
    assert ForbiddenSet.of(["122212"], 2).words == {w("122212"), w("212221")}
    assert ForbiddenSet.of(["12", "123"], 3).words == {w("12"), w("21")}


def test_normalize_rejects_digits_outside_alphabet():
    with pytest.raises(ValueError):
        ForbiddenSet.of(["13"], 2)


@given(word_sets)
def test_normalize_is_idempotent_and_transpose_closed(data):
    A, words = data
    f = ForbiddenSet.of(words, A)
    assert normalize(f) == f
    assert all(transpose_word(x) in f.words for x in f.words)
    assert not any(u != v and contains(v, [u]) for u in f.words for v in f.words)


@given(word_sets, st.lists(st.integers(1, 3), min_size=1, max_size=12))
def test_avoidance_is_transpose_symmetric(data, seq):
    A, words = data
    f = ForbiddenSet.of(words, A)
    seq = [min(d, A) for d in seq]
    assert avoids(seq, f) == avoids(seq[::-1], f)
    # normalization keeps the subshift: same verdict as the raw words and their transposes
    raw = list(words) + [x[::-1] for x in words]
    assert avoids(seq, f) == (not contains(seq, raw))


def test_avoids_examples():
    # 1222122 has the factor 122212
    assert not avoids(w("1222122"), ForbiddenSet.of(["121", "122212"], 2))
    assert avoids(w("1222111"), ForbiddenSet.of(["121", "122212"], 2))
    assert not avoids_periodic((1,), ForbiddenSet.of(["11"], 2))


def test_w_avoids_its_region_words():
    from markovspec.certify.region import load_dataset
    ds = load_dataset("w3942.toml")
    rep = set(ds.replicating) | {transpose_word(r) for r in ds.replicating}
    f = ForbiddenSet.of([x for x in ds.forbidden if x not in rep], 3)
    assert avoids_periodic(ds.w.word, f)


# -- block graph and transitivity ------------------------------------------------------------

def test_block_graph_examples():
    full = block_graph(ForbiddenSet.of([], 2))
    assert set(full.essential.nodes) == {(1,), (2,)}
    g = block_graph(ForbiddenSet.of(["11"], 2)).essential
    assert (1,) not in [v for v in g.successors((1,))]
    bg = block_graph(ForbiddenSet.of(["121", "212"], 2)).essential
    assert bg.has_edge((1, 1), (1, 1)) and bg.has_edge((2, 2), (2, 2))
    assert bg.has_edge((1, 1), (1, 2)) and bg.has_edge((1, 2), (2, 2))


@pytest.mark.parametrize("words, A, expected", [
    (["121", "212"], 2, True),
    (["12", "21"], 2, False),
    ([], 3, True),
    (["11", "22"], 2, True),
])
def test_transitivity_examples(words, A, expected):
    assert is_transitive(ForbiddenSet.of(words, A))[0] is expected


def test_empty_subshift_is_an_error():
    with pytest.raises(EmptySubshiftError):
        is_transitive(ForbiddenSet.of(["1", "2"], 2))


def test_transitivity_matches_reachability_oracle():
    rng = random.Random(7)
    seen = 0
    while seen < 250:
        A = rng.randint(1, 3)
        f = ForbiddenSet.of(random_set(rng, A), A)
        expected = brute_transitive(f.words, A)
        if expected is None:
            with pytest.raises(EmptySubshiftError):
                is_transitive(f)
        else:
            assert is_transitive(f)[0] is expected, f
        seen += 1


def test_connect_witnesses_examples():
    t = connect_witnesses(ForbiddenSet.of(["121", "212"], 2), 1)
    assert t[w("121")] == (2,)  # 12 2 1^inf
    assert t[w("212")] == ()  # 21 1^inf
    assert connect_witnesses(ForbiddenSet.of(["11"], 2), 2)[w("11")] == ()
    C = ForbiddenSet.of(["121", "122212"], 2)
    t = connect_witnesses(C, 1)
    assert all(tau is not None for tau in t.values())
    for conn in ("122", "1222", "212222"):
        assert avoids(w(conn) + (1,) * 8, C)


def test_connect_witnesses_needs_the_constant_sequence():
    with pytest.raises(ValueError):
        connect_witnesses(ForbiddenSet.of(["11"], 2), 1)


@given(word_sets)
def test_witnesses_are_admissible(data):
    A, words = data
    f = ForbiddenSet.of(words, A)
    letter = next((d for d in range(1, A + 1) if avoids_periodic((d,), f)), None)
    if letter is None:
        return
    for x, tau in connect_witnesses(f, letter).items():
        if tau is not None:
            assert avoids(x[:-1] + tau + (letter,) * (f.max_len + 1), f)


def test_bundled_certificate_subshifts_are_transitive():
    from markovspec.certify.good_interval import load_certificate
    for name in ("3_05-3_12.cert", "3_35-3_42.cert"):
        cert = load_certificate(name)
        assert is_transitive(cert.B)[0] and is_transitive(cert.C)[0]


# -- approximations of Sigma_t ------------------------------------------------------------------

def test_approx_sigma_t_examples():
    assert len(approx_sigma_t(100, 2, 3)) == 0
    assert w("11311") in approx_sigma_t(3, 2, 3)


def test_approx_sigma_t_is_monotone_in_t():
    for a, b in ((Fraction(3), Fraction(7, 2)), (Fraction(37, 10), Fraction(39, 10))):
        assert approx_sigma_t(b, 2, 3).words <= approx_sigma_t(a, 2, 3).words


def test_approx_sigma_t_refines_with_n():
    t = Fraction(394, 100)
    coarse, fine = approx_sigma_t(t, 2, 3, minimal=True), approx_sigma_t(t, 3, 3, minimal=True)
    # Sigma(F(3, t)) is inside Sigma(F(2, t)): no word of F(2, t) survives in it
    assert subshift_included(fine, coarse) == []


def test_approx_sigma_t_sandwich_by_sampling():
    t, n, A = Fraction(35, 10), 3, 3
    f = approx_sigma_t(t, n, A)
    rng = random.Random(5)
    inside = outside = 0
    for _ in range(3000):
        p = tuple(rng.randint(1, A) for _ in range(rng.randint(1, 8)))
        m = periodic_markov(p)[0]
        if avoids_periodic(p, f):
            inside += 1
            assert m <= t + Fraction(2) ** (1 - n)
        if m <= t:
            outside += 1
            assert avoids_periodic(p, f)
    assert inside > 50 and outside > 50


def test_minimal_approximation_defines_the_same_subshift():
    t = Fraction(37, 10)
    full, small = approx_sigma_t(t, 2, 3), approx_sigma_t(t, 2, 3, minimal=True)
    for length in range(1, 8):
        for p in product(range(1, 4), repeat=length):
            assert avoids_periodic(p, full) == avoids_periodic(p, small)


# -- file format -----------------------------------------------------------------------------

def test_fset_round_trip():
    f = ForbiddenSet.of(["121", "1333"], 3)
    assert parse_fset(dump_fset(f)) == f


def test_fset_errors_have_line_numbers():
    with pytest.raises(FormatError, match=":3:"):
        parse_fset("alphabet: 3\n121\n12a\n")
    with pytest.raises(FormatError, match="alphabet"):
        parse_fset("121\n")


def test_subshift_helpers():
    s = Subshift.of(["121"], 2)
    assert s.alphabet == 2 and s.transpose() == s
    assert s.contains_periodic((1, 2, 2)) and not s.contains_periodic((1, 2))
