import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rankbs.errors import (
    CubicConditionViolated,
    DegreeTooLarge,
    FlipSizeMismatch,
    LetterOutOfRange,
    NonBijectiveTheta,
    SizeOverflow,
)
from rankbs.kgraph import (
    KGraph,
    Path,
    ThetaFamily,
    compose,
    compose_all,
    cubic_rewrites,
    degrees_upto,
    enumerate_paths,
    factorize,
    is_prefix,
    make_theta,
    minimal_common_extensions,
    normalize_word,
    validate_kgraph,
)

D23 = validate_kgraph(2, (2, 3), "division")
D235 = validate_kgraph(3, (2, 3, 5), "division")
FLIP3 = validate_kgraph(2, (3, 3), "flip")
TRIV = validate_kgraph(3, (2, 2, 3), "trivial")
GRAPHS = [D23, D235, FLIP3, TRIV]


def words(graph, max_len=8):
    letter = st.integers(0, graph.k - 1).flatmap(
        lambda c: st.tuples(st.just(c + 1), st.integers(0, graph.sizes[c] - 1)))
    return st.lists(letter, max_size=max_len)


def paths(graph, max_per_color=2):
    return st.tuples(*[st.lists(st.integers(0, n - 1), max_size=max_per_color).map(tuple)
                       for n in graph.sizes]).map(Path)


# -- validation ----------------------------------------------------------------


def test_trivial_theta_validates_on_any_sizes():
    for sizes in ((1,), (2, 5), (3, 1, 4), (2, 2, 2, 2)):
        validate_kgraph(len(sizes), sizes, "trivial")


def test_division_validates_in_rank_three():
    g = validate_kgraph(3, (2, 3, 5), "division")
    assert g.count_paths((1, 1, 1)) == 30


def test_trivial_flip_flip_fails_cubic_condition():
    trivial = [[(s, t) for t in range(2)] for s in range(2)]
    flip = [[(t, s) for t in range(2)] for s in range(2)]
    with pytest.raises(CubicConditionViolated) as info:
        validate_kgraph(3, (2, 2, 2), [trivial, flip, flip])
    d = info.value.details
    assert d["rewrite_a"] != d["rewrite_b"]
    assert {"i", "j", "l", "s", "t", "u"} <= set(d)


def test_transposition_on_one_pair_is_consistent():
    # swapping (0,1) <-> (1,1) in theta_23 alone still satisfies the cubic condition
    trivial = [[(s, t) for t in range(2)] for s in range(2)]
    swapped = [[(s, t) for t in range(2)] for s in range(2)]
    swapped[0][1], swapped[1][1] = (1, 1), (0, 1)
    validate_kgraph(3, (2, 2, 2), [trivial, trivial, swapped])


def test_non_bijective_theta_rejected():
    with pytest.raises(NonBijectiveTheta) as info:
        validate_kgraph(2, (2, 2), [[[(0, 0), (0, 0)], [(1, 1), (1, 0)]]])
    assert info.value.details == {"i": 1, "j": 2}


def test_cubic_condition_matches_brute_force_over_random_tables():
    rng = random.Random(7)
    for _ in range(40):
        tabs = []
        for _pair in range(3):
            cells = [(s, t) for s in range(2) for t in range(2)]
            rng.shuffle(cells)
            tabs.append([cells[0:2], cells[2:4]])
        try:
            g = validate_kgraph(3, (2, 2, 2), tabs)
        except CubicConditionViolated:
            g = None
        # recompute: every length-3 word gives the same reversed word both ways
        k = KGraph(ThetaFamily.from_tables((2, 2, 2), tabs))
        consistent = all(
            (lambda ab: ab[0] == ab[1])(cubic_rewrites(k, (0, s), (1, t), (2, u)))
            for s, t, u in itertools.product(range(2), repeat=3))
        assert consistent == (g is not None)


# -- make_theta ----------------------------------------------------------------


def test_division_theta_example():
    th = make_theta("division", (2, 3))
    assert th(0, 1, 1, 2) == (1, 2)
    for s in range(2):
        for t in range(3):
            s2, t2 = th(0, 1, s, t)
            assert s + t * 2 == t2 + s2 * 3


def test_division_with_equal_sizes_is_flip():
    for n in (2, 3, 4):
        assert make_theta("division", (n, n)).tables == make_theta("flip", (n, n)).tables


def test_trivial_theta_and_flip_mismatch():
    assert make_theta("trivial", (2, 3))(0, 1, 0, 0) == (0, 0)
    with pytest.raises(FlipSizeMismatch):
        make_theta("flip", (2, 3))


# -- normal forms --------------------------------------------------------------


def test_normalize_word_examples():
    assert normalize_word(D23, [(2, 0), (1, 1)]) == D23.path((1,), (1,))
    assert normalize_word(D23, []) == Path.empty(2)
    assert normalize_word(D23, [(1, 1), (1, 0), (2, 2)]) == D23.path((1, 0), (2,))
    with pytest.raises(LetterOutOfRange):
        normalize_word(D23, [(1, 2)])


@given(st.data())
def test_normalize_word_is_swap_invariant(data):
    g = data.draw(st.sampled_from(GRAPHS))
    w = data.draw(words(g))
    p = normalize_word(g, w)
    assert normalize_word(g, [(c + 1, s) for c, s in p.letters()]) == p
    if len(w) >= 2:
        i = data.draw(st.integers(0, len(w) - 2))
        (c1, x), (c2, y) = w[i], w[i + 1]
        if c1 != c2:
            a, b = g.swap((c1 - 1, x), (c2 - 1, y))
            w2 = w[:i] + [(a[0] + 1, a[1]), (b[0] + 1, b[1])] + w[i + 2:]
            assert normalize_word(g, w2) == p


# -- composition and factorization --------------------------------------------


def test_compose_examples():
    p = D23.path((1,), (0, 2))
    assert compose(D23, p, Path.empty(2)) == p == compose(D23, Path.empty(2), p)
    assert compose(D23, D23.edge(2, 2), D23.edge(1, 1)) == D23.path((1,), (2,))


@given(st.data())
def test_compose_is_associative_and_additive(data):
    g = data.draw(st.sampled_from(GRAPHS))
    p, q, r = (data.draw(paths(g)) for _ in range(3))
    pq = compose(g, p, q)
    assert pq.degree == tuple(a + b for a, b in zip(p.degree, q.degree))
    assert compose(g, pq, r) == compose(g, p, compose(g, q, r)) == compose_all(g, p, q, r)


def test_factorize_round_trip_exhaustive_d23():
    for n in degrees_upto((2, 2)):
        for p in enumerate_paths(D23, n):
            for m in degrees_upto(n):
                a, b = factorize(D23, p, m)
                assert a.degree == m and compose(D23, a, b) == p
            assert factorize(D23, p, n) == (p, Path.empty(2))
            assert factorize(D23, p, (0, 0)) == (Path.empty(2), p)


def test_factorize_of_composition_exhaustive_rank3():
    g = validate_kgraph(3, (2, 2, 3), "division")
    small = [p for n in degrees_upto((1, 1, 1)) for p in enumerate_paths(g, n)]
    for p in small:
        for q in small:
            assert factorize(g, compose(g, p, q), p.degree) == (p, q)


def test_factorize_rejects_large_degree():
    with pytest.raises(DegreeTooLarge):
        factorize(D23, D23.edge(1, 0), (0, 1))


# -- enumeration ---------------------------------------------------------------


def test_enumerate_paths_counts_and_order():
    assert list(enumerate_paths(D23, (0, 0))) == [Path.empty(2)]
    assert list(enumerate_paths(D23, (1, 0))) == [D23.edge(1, 0), D23.edge(1, 1)]
    assert len(enumerate_paths(D23, (1, 1))) == 6
    for n in degrees_upto((3, 3)):
        ps = list(enumerate_paths(D23, n))
        assert len(ps) == len(set(ps)) == 2 ** n[0] * 3 ** n[1]
        assert ps == sorted(ps)


def test_enumeration_cap():
    g = validate_kgraph(2, (2, 3), "division", cap=100)
    with pytest.raises(SizeOverflow):
        enumerate_paths(g, (4, 3))


# -- prefixes and common extensions ---------------------------------------------


def test_is_prefix_examples():
    tau = D23.path((1,), (0,))
    assert is_prefix(D23, Path.empty(2), tau) == tau
    assert is_prefix(D23, tau, tau) == Path.empty(2)
    assert is_prefix(D23, D23.edge(1, 0), tau) is None


def test_minimal_common_extensions_examples():
    e = D23.edge(1, 0)
    assert minimal_common_extensions(D23, e, e) == [(Path.empty(2), Path.empty(2))]
    assert minimal_common_extensions(D23, e, D23.edge(1, 1)) == []
    ext = minimal_common_extensions(D23, e, D23.edge(2, 1))
    assert len(ext) == 1
    gam, dl = ext[0]
    assert gam.degree == (0, 1) and dl.degree == (1, 0)
    assert compose(D23, e, gam) == compose(D23, D23.edge(2, 1), dl)


def test_flip_graph_has_several_minimal_extensions():
    ext = minimal_common_extensions(FLIP3, FLIP3.edge(1, 0), FLIP3.edge(2, 0))
    assert len(ext) == 3
    assert minimal_common_extensions(FLIP3, FLIP3.edge(1, 0), FLIP3.edge(2, 1)) == []


# -- serialization -------------------------------------------------------------


@given(st.data())
def test_path_json_round_trip(data):
    g = data.draw(st.sampled_from(GRAPHS))
    p = data.draw(paths(g, 4))
    assert Path.from_json(p.to_json()) == p
