"""Invariant suites over a fixed zoo of instances.

Every suite draws from its own ``random.Random`` seeded from the session seed
and the suite name, so documents are reproducible byte for byte.
"""

from __future__ import annotations

import random
import zlib
from fractions import Fraction
from dataclasses import dataclass, field

from . import semigroup as sg
from . import staralg as sa
from .errors import RankBSError
from .kgraph import degrees_upto, dscale, enumerate_paths, ones, validate_kgraph
from .periodicity import (
    CyclineTriple,
    affine_presentation_check,
    cycline_structure,
    is_cycline_to_depth,
    periodicity_search,
    phi_pq,
    rank1_periodicity,
    relation_lattice,
    simplicity_report,
)
from .selfsim import (
    SelfSimilarKGraph,
    act_by_iteration,
    act_restrict,
    is_pseudo_free,
    make_lambda_one,
    make_odometer,
    make_product_of_odometers,
    odometer_formula_oracle,
)


class CheckFailed(Exception):
    def __init__(self, message: str, **witness):
        super().__init__(message)
        self.witness = witness


@dataclass
class SuiteResult:
    instance: str
    suite: str
    ok: bool
    checks: int
    counterexample: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        doc = {"instance": self.instance, "suite": self.suite, "ok": self.ok, "checks": self.checks}
        if not self.ok:
            doc["counterexample"] = self.counterexample
        return doc


def _rng(seed: int, *names) -> random.Random:
    return random.Random((seed << 32) ^ zlib.crc32("/".join(names).encode()))


def _need(cond: bool, message: str, **witness) -> None:
    if not cond:
        raise CheckFailed(message, **witness)


def random_element(ss: SelfSimilarKGraph, rng: random.Random, length: int = 6) -> sg.SemigroupElement:
    gens = sg.generators(ss)
    return sg.multiply_all(ss, (rng.choice(gens) for _ in range(rng.randint(0, length))))


# ---------------------------------------------------------------------------
# suites


def suite_action(ss, rng, cfg) -> int:
    """Closed-form action against letter-by-letter iteration."""
    n = 0
    for d in degrees_upto(dscale(2, ones(ss.k))):
        for p in enumerate_paths(ss.graph, d)[:50]:
            g = rng.randint(-12, 12)
            fast, slow = act_restrict(ss, g, p), act_by_iteration(ss, g, p)
            _need(fast == slow, "closed form disagrees with iteration", g=g, path=str(p),
                  fast=[str(fast[0]), fast[1]], slow=[str(slow[0]), slow[1]])
            n += 1
    if ss.label == "odometer":
        nn, mm = ss.params["n"], ss.params["m"]
        for g in range(-20, 21):
            for s in range(nn):
                img, h = ss.edge_act(0, s, g)
                _need((img, h) == odometer_formula_oracle(nn, mm, g, s), "odometer formula mismatch", g=g, s=s)
                n += 1
    return n


def suite_semigroup(ss, rng, cfg, trials: int = 150) -> int:
    n = 0
    for _ in range(trials):
        x, y, z = (random_element(ss, rng) for _ in range(3))
        lhs = sg.multiply(ss, sg.multiply(ss, x, y), z)
        rhs = sg.multiply(ss, x, sg.multiply(ss, y, z))
        _need(lhs == rhs, "multiplication is not associative",
              x=sg.element_str(ss, x), y=sg.element_str(ss, y), z=sg.element_str(ss, z))
        q = sg.left_quotient(ss, x, sg.multiply(ss, x, y))
        _need(q == y, "left cancellation fails", x=sg.element_str(ss, x), y=sg.element_str(ss, y))
        n += 2
    return n


def suite_lcm(ss, rng, cfg, pairs: int = 12, bound: int = 4) -> int:
    n = 0
    for _ in range(pairs):
        x = random_element(ss, rng, 3)
        y = random_element(ss, rng, 3)
        try:
            z = sg.right_lcm(ss, x, y)
        except RankBSError:
            continue
        if z is None:
            continue
        _need(sg.divides(ss, x, z) and sg.divides(ss, y, z), "right_lcm is not a common multiple",
              x=sg.element_str(ss, x), y=sg.element_str(ss, y), z=sg.element_str(ss, z))
        status, w = sg.bfs_right_lcm(ss, x, y, bound)
        if status == "least":
            _need(w == z, "right_lcm disagrees with bounded search",
                  x=sg.element_str(ss, x), y=sg.element_str(ss, y), lcm=sg.element_str(ss, z),
                  bfs=sg.element_str(ss, w))
        n += 1
    return n


def suite_periodicity(ss, rng, cfg) -> int:
    v = rank1_periodicity(ss)
    found = periodicity_search(ss, depth=4)
    _need(v.periodic == (found is not None), "periodicity verdict disagrees with brute force",
          verdict=v.periodic, witness=None if found is None else [str(found.mu), found.g, str(found.nu)])
    return 1


def suite_cycline(ss, rng, cfg, depth: int = 3) -> int:
    st = cycline_structure(ss)
    N = ss.orbit_lcm
    top = ones(ss.k)
    paths = [p for d in degrees_upto(top) for p in enumerate_paths(ss.graph, d)]
    n = 0
    for mu in paths:
        for nu in paths:
            for g in range(-2 * N, 2 * N + 1):
                t = CyclineTriple(mu, g, nu)
                got = bool(is_cycline_to_depth(ss, t, depth))
                _need(got == st.contains(t), "structural cycline set disagrees with the depth check",
                      mu=str(mu), g=g, nu=str(nu), structural=st.contains(t), depth_check=got)
                n += 1
    return n


def suite_star(ss, rng, cfg, trials: int = 60) -> int:
    top = (1,) * ss.k
    n = 0
    for _ in range(trials):
        m1, m2, m3 = (sa.random_monomial(ss, rng, top, 3) for _ in range(3))
        _need(sa.associator_vanishes(ss, m1, m2, m3), "product is not associative",
              m1=str(m1), m2=str(m2), m3=str(m3))
        A, B = (sa.FormalCombination.monomial(m) for m in (m1, m2))
        _need(sa.canonical_eq(ss, sa.adjoint(sa.product(ss, A, B)),
                              sa.product(ss, sa.adjoint(B), sa.adjoint(A))),
              "(AB)* != B*A*", m1=str(m1), m2=str(m2))
        r = tuple(rng.randint(0, 1) for _ in range(ss.k))
        _need(sa.canonical_eq(ss, sa.refine(ss, m1, r), A), "refinement changes the element",
              m=str(m1), r=list(r))
        n += 3
    return n


def suite_states(ss, rng, cfg, trials: int = 60) -> int:
    top = (1,) * ss.k
    n = 0
    for _ in range(trials):
        m1, m2 = (sa.random_monomial(ss, rng, top, 3) for _ in range(2))
        _need(sa.kms_check_monomials(ss, m1, m2), "KMS identity fails", m1=str(m1), m2=str(m2))
        A = sa.FormalCombination.monomial(m1)
        r = tuple(rng.randint(0, 1) for _ in range(ss.k))
        _need(sa.omega(ss, sa.refine(ss, m1, r)) == sa.omega(ss, A), "omega is not refinement invariant",
              m=str(m1), r=list(r))
        S = sa.S_map(ss, A)
        _need(S == sa.J_map(ss, sa.delta_pow(ss, A, Fraction(1, 2))), "S != J Delta^(1/2)", m=str(m1))
        _need(sa.F_map(ss, A) == sa.J_map(ss, sa.delta_pow(ss, A, Fraction(-1, 2))),
              "F != J Delta^(-1/2)", m=str(m1))
        n += 4
    return n


def suite_report(ss, rng, cfg, expect: dict) -> int:
    rep = simplicity_report(ss).to_json()
    for key, want in expect.items():
        _need(rep[key] == want, f"report field {key} is {rep[key]!r}, expected {want!r}", field=key)
    return len(expect)


def suite_center(ss, rng, cfg) -> int:
    lat = relation_lattice(ss.sizes)
    n = 0
    for b in lat.basis:
        p = tuple(max(x, 0) for x in b)
        q = tuple(max(-x, 0) for x in b)
        phi_pq(ss, p, q)  # exhaustive commutation check inside
        V = sa.build_V(ss, p, q)
        _need(sa.is_unitary(ss, V), "V is not unitary", p=list(p), q=list(q))
        res = sa.commutes_with_generators(ss, V)
        _need(res["ok"], "V does not commute with every generator", p=list(p), q=list(q),
              failures=res["failures"])
        n += 2
    return n


def suite_fprime(ss, rng, cfg) -> int:
    ms = sa.monomials_upto(ss, (1,) * ss.k, range(-2, 3))
    kept = [m for m in ms if sa.in_fprime(ss, m)]
    n = 0
    for a in kept:
        for b in kept:
            A, B = sa.FormalCombination.monomial(a), sa.FormalCombination.monomial(b)
            _need(sa.fprime_commute_check(ss, A, B), "F' monomials do not commute", a=str(a), b=str(b))
            n += 1
    for _ in range(40):
        a, b = rng.choice(kept), rng.choice(ms)
        _need(sa.normalizer_check(ss, sa.FormalCombination.monomial(b), sa.FormalCombination.monomial(a)),
              "B* A B leaves F'", a=str(a), b=str(b))
        n += 1
    return n


def suite_examples(ss, rng, cfg) -> int:
    res = sa.run_example_mn(2)
    _need(res["ok"], "BS+(2,2) example maps fail")
    res = sa.run_example_squareflip()
    _need(res["ok"], "square/flip example maps fail")
    try:
        b = sa.broken_flip_map()
        sa.hom_check(b["src"], b["dst"], b["images"], with_unitary=False)
    except RankBSError:
        pass
    else:
        raise CheckFailed("a map collapsing e_0 and e_1 was accepted")
    return 3


def suite_furstenberg(ss, rng, cfg) -> int:
    n = 0
    for p, q in ((2, 3), (3, 5), (2, 5)):
        n += len(affine_presentation_check(p, q)["checks"])
    return n


def suite_pseudo_free(ss, rng, cfg) -> int:
    _need(bool(is_pseudo_free(ss)), "instance is not pseudo-free", **is_pseudo_free(ss).witness)
    return 1


# ---------------------------------------------------------------------------
# zoo


def _zoo():
    return [
        ("E(2,3)", lambda: make_odometer(2, 3),
         ["pseudo_free", "action", "semigroup", "lcm", "periodicity", "cycline", "star"],
         {"periodic": False, "simple": True}),
        ("E(2,6)", lambda: make_odometer(2, 6),
         ["pseudo_free", "action", "semigroup", "lcm", "periodicity", "cycline", "star"],
         {"periodic": True, "simple": False}),
        ("BS+(2,2)", lambda: make_odometer(2, 2),
         ["pseudo_free", "action", "semigroup", "lcm", "periodicity", "cycline", "star"],
         {"periodic": True, "simple": False}),
        ("Lambda_d((2,3),1)", lambda: make_product_of_odometers((2, 3)),
         ["pseudo_free", "action", "semigroup", "star", "states"],
         {"periodic": False, "simple": True}),
        ("Lambda_d((2,4),1)", lambda: make_product_of_odometers((2, 4)),
         ["pseudo_free", "action", "semigroup", "star", "states", "center"],
         {"periodic": True, "simple": False}),
        ("Lambda(1,(2,3))", lambda: make_lambda_one((2, 3)),
         ["pseudo_free", "action", "semigroup", "star", "fprime"],
         {"periodic": True, "simple": False}),
        ("Lambda(1,(2,4))", lambda: make_lambda_one((2, 4)),
         ["pseudo_free", "action", "semigroup", "star", "fprime"],
         {"periodic": True, "simple": False}),
        ("flip/square", lambda: sa.flip_algebra(2), ["pseudo_free", "examples", "furstenberg"], None),
    ]


_SUITES = {
    "pseudo_free": suite_pseudo_free,
    "action": suite_action,
    "semigroup": suite_semigroup,
    "lcm": suite_lcm,
    "periodicity": suite_periodicity,
    "cycline": suite_cycline,
    "star": suite_star,
    "states": suite_states,
    "center": suite_center,
    "fprime": suite_fprime,
    "examples": suite_examples,
    "furstenberg": suite_furstenberg,
}


def _generic_suites(ss: SelfSimilarKGraph) -> list:
    names = ["pseudo_free", "action", "semigroup"]
    if ss.is_rank1:
        names += ["lcm", "periodicity", "cycline"]
    if bool(is_pseudo_free(ss)):
        names.append("star")
    if ss.is_product_odometers:
        names.append("states")
        if not relation_lattice(ss.sizes).independent:
            names.append("center")
    if ss.is_lambda_one and ss.k >= 2:
        names.append("fprime")
    return names


def cubic_violation():
    """A three-color theta family that fails the cubic condition."""
    trivial = [[(s, t) for t in range(2)] for s in range(2)]
    flip = [[(t, s) for t in range(2)] for s in range(2)]
    return validate_kgraph(3, (2, 2, 2), [trivial, flip, flip])


def run_selftest(seed: int = 0, configured=None, configured_name: str = "configured",
                 inject_cubic: bool = False) -> dict:
    """Run every suite; ``configured`` is an optional builder for the session instance."""
    plan = []
    if configured is not None:
        plan.append((configured_name, configured, None, None))
    for name, build, suites, expect in _zoo():
        plan.append((name, build, suites, expect))
    if inject_cubic:
        plan.append(("injected cubic violation", cubic_violation, [], None))
    results = []
    for name, build, suites, expect in plan:
        try:
            ss = build()
        except RankBSError as exc:
            results.append(SuiteResult(name, "construction", False, 0, exc.to_dict()))
            continue
        if suites is None:
            suites = _generic_suites(ss)
        for suite in suites:
            rng = _rng(seed, name, suite)
            try:
                n = _SUITES[suite](ss, rng, None)
                results.append(SuiteResult(name, suite, True, n))
            except CheckFailed as exc:
                results.append(SuiteResult(name, suite, False, 0, {"message": str(exc), **exc.witness}))
            except RankBSError as exc:
                results.append(SuiteResult(name, suite, False, 0, exc.to_dict()))
        if expect:
            try:
                n = suite_report(ss, None, None, expect)
                results.append(SuiteResult(name, "report", True, n))
            except CheckFailed as exc:
                results.append(SuiteResult(name, "report", False, 0, {"message": str(exc), **exc.witness}))
    failures = [r for r in results if not r.ok]
    doc = {
        "seed": seed,
        "ok": not failures,
        "suites": [r.to_json() for r in results],
        "passed": sum(r.ok for r in results),
        "failed": len(failures),
    }
    if failures:
        doc["first_failure"] = failures[0].to_json()
    return doc
