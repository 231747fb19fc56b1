import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rankbs import semigroup as sg
from rankbs.errors import DegreesNotEquivalent, UnsupportedFamily, ZeroInput
from rankbs.kgraph import Path, degrees_upto, enumerate_paths
from rankbs.periodicity import (
    AffineElement,
    CyclineTriple,
    addr,
    affine_presentation_check,
    cycline_structure,
    is_cycline_to_depth,
    path_at,
    phi_pq,
    product_is_one,
    rank1_periodicity,
    relation_lattice,
    simplicity_report,
    solve_commuting_exponent,
    triples_upto,
)
from rankbs.selfsim import (
    act_restrict,
    make_gbs,
    make_lambda_one,
    make_odometer,
    make_odometer_family,
    make_product_of_odometers,
)

D23 = make_product_of_odometers((2, 3))
D24 = make_product_of_odometers((2, 4))
E = lambda *s: Path((tuple(s),))


# -- relation lattices ------------------------------------------------------------


def test_relation_lattice_examples():
    assert relation_lattice((2, 3)).basis == ()
    assert relation_lattice((2, 4)).basis == ((2, -1),)
    assert relation_lattice((-2, 2)).basis == ((2, -2),)
    assert relation_lattice((-1,)).basis == ((2,),)
    with pytest.raises(ZeroInput):
        relation_lattice((2, 0))


@given(st.lists(st.integers(-12, 12).filter(lambda x: x not in (0,)), min_size=1, max_size=3))
def test_relation_lattice_matches_search(ps):
    lat = relation_lattice(ps)
    for b in lat.basis:
        assert product_is_one(ps, b)
    for q in itertools.product(range(-6, 7), repeat=len(ps)):
        assert lat.contains(q) == product_is_one(ps, q), (ps, q)


def test_lattice_basis_is_canonical():
    assert relation_lattice((4, 2)).basis == relation_lattice((4, 2)).basis
    a = relation_lattice((2, 4, 8))
    for q in itertools.product(range(-4, 5), repeat=3):
        assert a.contains(q) == product_is_one((2, 4, 8), q)


# -- rank-1 periodicity ----------------------------------------------------------


def test_rank1_periodicity_examples():
    assert rank1_periodicity(make_odometer(2, 6)).periodic
    assert not rank1_periodicity(make_odometer(2, 3)).periodic
    assert not rank1_periodicity(make_gbs([(2, [0, 4]), (3, [0, 0, 5])])).periodic
    assert rank1_periodicity(make_gbs([(2, [0, 4]), (3, [0, 0, 6])])).periodic


def test_simplicity_report_swaps_n_and_m():
    for n, m in ((2, 4), (3, 6), (2, 6), (3, 9)):
        r1, r2 = simplicity_report(make_odometer(n, m)), simplicity_report(make_odometer(m, n))
        assert (r1.periodic, r1.simple, r1.kirchberg) == (True, False, False)
        assert (r2.periodic, r2.simple, r2.kirchberg) == (False, True, True)


def test_simplicity_report_products_and_lambda_one():
    r = simplicity_report(D23)
    assert (r.periodic, r.simple, r.kirchberg) == (False, True, None)
    r = simplicity_report(D24)
    assert (r.periodic, r.simple, r.kirchberg) == (True, False, False)
    assert r.lattice.basis == ((2, -1),)
    r = simplicity_report(make_lambda_one((2, 3)))
    assert (r.periodic, r.simple) == (True, False)
    with pytest.raises(UnsupportedFamily):
        simplicity_report(make_odometer_family("flip", [(3, 2), (3, 2)]))
    doc = simplicity_report(D24).to_json()
    assert doc["lattice"]["basis"] == [[2, -1]]


# -- cycline triples -------------------------------------------------------------


def test_cycline_examples():
    e26 = make_odometer(2, 6)
    s = cycline_structure(e26)
    assert s.contains(CyclineTriple(E(0), 2, E(0)))
    assert not s.contains(CyclineTriple(E(0), 1, E(0)))
    assert is_cycline_to_depth(e26, CyclineTriple(E(), 2, E()), 6)
    v = is_cycline_to_depth(make_odometer(2, 3), CyclineTriple(E(), 1, E()), 4)
    assert v.status == "falsified" and v.depth == 1
    single = make_odometer(1, 3)
    assert cycline_structure(single).contains(CyclineTriple(E(0, 0), 5, E()))
    e23 = cycline_structure(make_odometer(2, 3))
    assert e23.contains(CyclineTriple(E(1), 0, E(1)))
    assert not e23.contains(CyclineTriple(E(1), 0, E(0)))


def test_trivial_triples_always_hold():
    for ss in (make_odometer(2, 3), D23, make_lambda_one((2, 3))):
        mu = enumerate_paths(ss.graph, (1,) * ss.k)[-1]
        assert is_cycline_to_depth(ss, CyclineTriple(mu, 0, mu), 3)


def test_structure_matches_depth_checks_on_lambda_d24():
    ss = D24
    struct = cycline_structure(ss)
    seen = 0
    for t in triples_upto(ss, (1, 1), 2):
        assert bool(is_cycline_to_depth(ss, t, 3)) == struct.contains(t), t
        seen += 1
    assert seen == 15 * 15 * 5
    # the lattice relation (2,-1) shows up as (mu, 0, nu) with d(mu) = (2,0), d(nu) = (0,1)
    for mu in enumerate_paths(ss.graph, (2, 0)):
        for nu in enumerate_paths(ss.graph, (0, 1)):
            t = CyclineTriple(mu, 0, nu)
            assert bool(is_cycline_to_depth(ss, t, 3)) == struct.contains(t)
            assert struct.contains(t) == (addr(ss, mu) == addr(ss, nu))


def test_cycline_unsupported_family():
    with pytest.raises(UnsupportedFamily):
        cycline_structure(make_odometer_family("flip", [(3, 2), (3, 2)]))


# -- addresses and phi -----------------------------------------------------------


def test_addr_examples():
    po2 = make_product_of_odometers((2,))
    assert addr(po2, E(0, 0)) == 0
    for s1 in range(2):
        for s2 in range(2):
            assert addr(po2, E(s1, s2)) == s1 + 2 * s2


def test_addr_is_a_bijection_and_matches_the_orbit():
    for p in degrees_upto((2, 2)):
        ps = enumerate_paths(D23.graph, p)
        addrs = sorted(addr(D23, mu) for mu in ps)
        assert addrs == list(range(len(ps)))
        zero_path = path_at(D23, p, 0)
        for mu in ps:
            assert path_at(D23, p, addr(D23, mu)) == mu
            assert act_restrict(D23, addr(D23, mu), zero_path)[0] == mu


def test_phi_examples():
    phi = phi_pq(D24, (2, 0), (0, 1))
    assert phi(D24.graph.path((1, 0), ())) == D24.graph.path((), (1,))
    ident = phi_pq(D24, (1, 1), (1, 1))
    assert all(k == v for k, v in ident.forward.items())
    with pytest.raises(DegreesNotEquivalent):
        phi_pq(D23, (1, 0), (0, 1))


def test_phi_identities_for_larger_relations():
    for p, q in (((2, 0), (0, 1)), ((4, 0), (0, 2)), ((2, 1), (0, 2)), ((3, 0), (1, 1))):
        phi = phi_pq(D24, p, q)
        assert len(phi.forward) == math.prod(n ** e for n, e in zip((2, 4), p))


def test_solve_commuting_exponent():
    po2 = make_product_of_odometers((2,))
    assert solve_commuting_exponent(po2, E(0), E(0), 0) == 0
    assert solve_commuting_exponent(po2, E(0), E(1), 0) == 1
    rng = random.Random(5)
    for _ in range(100):
        mu = D23.graph.path([rng.randrange(2) for _ in range(2)], [rng.randrange(3)])
        nu = D23.graph.path([rng.randrange(2) for _ in range(2)], [rng.randrange(3)])
        m = rng.randint(-6, 6)
        ell = solve_commuting_exponent(D23, mu, nu, m)
        lhs = sg.multiply(D23, sg.generator_a(D23, ell), sg.SemigroupElement(mu, 0))
        rhs = sg.multiply(D23, sg.SemigroupElement(nu, 0), sg.generator_a(D23, m))
        assert lhs == rhs
    with pytest.raises(DegreesNotEquivalent):
        solve_commuting_exponent(D23, E(), D23.graph.edge(1, 0), 0)


# -- affine model ----------------------------------------------------------------


def test_affine_digit_example():
    z, s, t = AffineElement(1, 1), AffineElement(2, 0), AffineElement(3, 0)
    e1, f2 = z * s, z ** 2 * t
    lhs = e1 * f2
    assert lhs == z ** 2 * t * (z * s)
    assert lhs(Fraction(0)) == 5 and lhs(Fraction(1)) == 11
    assert s * t == t * s == AffineElement(6, 0)


@pytest.mark.parametrize("p,q", [(2, 3), (3, 5), (2, 5), (4, 6)])
def test_affine_presentation(p, q):
    res = affine_presentation_check(p, q)
    assert res["ok"] and len(res["digits"]) == p * q


def test_affine_inverse_and_power():
    x = AffineElement(Fraction(3, 2), Fraction(-1, 4))
    assert x * x.inverse() == AffineElement(1, 0)
    assert x ** -2 == (x * x).inverse()
    with pytest.raises(ValueError):
        affine_presentation_check(1, 3)


def test_cycline_period_is_the_lcm_of_orbit_lengths():
    # orbit lengths 2 and 4: a^4 already fixes every infinite path, although 2 * 4 = 8
    ss = make_gbs([(2, [0, 4]), (4, [0, 0, 0, 8])])
    s = cycline_structure(ss)
    assert s.period == 4
    for g in range(1, 9):
        t = CyclineTriple(E(), g, E())
        assert bool(is_cycline_to_depth(ss, t, 4)) == s.contains(t) == (g % 4 == 0)
