"""Periodicity, cycline triples and simplicity verdicts.

Addresses in the product-of-odometers family are mixed radix, least
significant digit first along the normal form: ``a`` adds one with carry, and
``addr(mu nu) = addr(mu) + n^{d(mu)} addr(nu)``.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from sympy import factorint

from . import _kernels
from .errors import DegreesNotEquivalent, RelationFailed, UnsupportedFamily, ZeroInput
from .kgraph import (
    Path,
    _split_sorted,
    compose,
    dadd,
    degrees_upto,
    dscale,
    enumerate_paths,
    factorize,
    make_theta,
    meet,
    ones,
)
from .selfsim import SelfSimilarKGraph, act, act_restrict

# ---------------------------------------------------------------------------
# integer lattices


def _echelon(rows: list, upto: int) -> list:
    """Unimodular row reduction of the first ``upto`` columns (integer entries)."""
    M = [list(r) for r in rows]
    r0 = 0
    for col in range(upto):
        while True:
            nz = [i for i in range(r0, len(M)) if M[i][col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(M[i][col]))
            M[r0], M[piv] = M[piv], M[r0]
            clean = True
            for i in range(r0 + 1, len(M)):
                if M[i][col]:
                    q = M[i][col] // M[r0][col]
                    M[i] = [a - q * b for a, b in zip(M[i], M[r0])]
                    clean = clean and M[i][col] == 0
            if clean:
                break
        if r0 < len(M) and M[r0][col] != 0:
            r0 += 1
    return M


def hermite_rows(vectors: list) -> tuple:
    """Canonical row Hermite form of the lattice spanned by ``vectors``.

    Positive pivots, entries above each pivot reduced into ``[0, pivot)``, zero
    rows dropped.  Equal lattices give equal tuples.
    """
    if not vectors:
        return ()
    n = len(vectors[0])
    M = [r for r in _echelon(vectors, n) if any(r)]
    pivots = []
    for r in M:
        c = next(i for i, x in enumerate(r) if x)
        if r[c] < 0:
            r[:] = [-x for x in r]
        pivots.append(c)
    for i, c in enumerate(pivots):
        for j in range(i):
            q = M[j][c] // M[i][c]
            if q:
                M[j] = [a - q * b for a, b in zip(M[j], M[i])]
    return tuple(tuple(r) for r in M)


def integer_kernel(A: list, ncols: int) -> list:
    """Basis of ``{q in Z^ncols : A q = 0}``."""
    m = len(A)
    aug = [[A[r][c] for r in range(m)] + [1 if j == c else 0 for j in range(ncols)] for c in range(ncols)]
    red = _echelon(aug, m)
    return [row[m:] for row in red if not any(row[:m])]


@dataclass(frozen=True)
class RelationLattice:
    values: tuple
    basis: tuple

    @property
    def k(self) -> int:
        return len(self.values)

    @property
    def independent(self) -> bool:
        return not self.basis

    def contains(self, q: Sequence[int]) -> bool:
        return product_is_one(self.values, q)

    def to_json(self) -> dict:
        return {"values": list(self.values), "basis": [list(b) for b in self.basis],
                "independent": self.independent}


def product_is_one(values: Sequence[int], q: Sequence[int]) -> bool:
    """``prod values_i^{q_i} == 1`` with exact integers."""
    num, den = 1, 1
    for v, e in zip(values, q):
        if e >= 0:
            num *= v ** e
        else:
            den *= v ** (-e)
    return num == den


def relation_lattice(p: Sequence[int]) -> RelationLattice:
    """All ``q in Z^k`` with ``prod p_i^{q_i} = 1``, as a canonical basis."""
    p = tuple(int(x) for x in p)
    if any(x == 0 for x in p):
        raise ZeroInput("relation lattice needs nonzero entries", values=p)
    k = len(p)
    primes = sorted({q for x in p for q in factorint(abs(x))})
    A = [[factorint(abs(x)).get(q, 0) for x in p] + [0] for q in primes]
    # sign parity: sum over negative entries of q_i must be even; extra variable y
    A.append([1 if x < 0 else 0 for x in p] + [-2])
    ker = integer_kernel(A, k + 1)
    basis = hermite_rows([row[:k] for row in ker])
    return RelationLattice(p, basis)


# ---------------------------------------------------------------------------
# rank one verdicts


@dataclass
class PeriodicityVerdict:
    periodic: bool
    table: list  # (n_i, m_i, n_i | m_i)
    reason: str

    def to_json(self) -> dict:
        return {"periodic": self.periodic, "reason": self.reason,
                "orbits": [{"n": n, "m": m, "divides": d} for n, m, d in self.table]}


def rank1_periodicity(ss: SelfSimilarKGraph) -> PeriodicityVerdict:
    if not ss.is_rank1:
        raise UnsupportedFamily("rank-1 periodicity needs k = 1", k=ss.k)
    table = [(n, m, m % n == 0) for _, n, m in ss.orbit_data]
    periodic = all(d for _, _, d in table)
    bad = [(n, m) for n, m, d in table if not d]
    reason = "n_i | m_i for every orbit" if periodic else f"orbit (n, m) = {bad[0]} has n not dividing m"
    return PeriodicityVerdict(periodic, table, reason)


# ---------------------------------------------------------------------------
# addresses (product of odometers)


def _require_po(ss: SelfSimilarKGraph) -> None:
    if not ss.is_product_odometers:
        raise UnsupportedFamily("operation needs the product-of-odometers family", family=ss.family)


def npow(ss: SelfSimilarKGraph, p: Sequence[int]) -> int:
    return math.prod(n ** e for n, e in zip(ss.sizes, p))


def addr(ss: SelfSimilarKGraph, mu: Path) -> int:
    _require_po(ss)
    total, scale = 0, 1
    for c, w in enumerate(mu.words):
        n = ss.sizes[c]
        for s in w:
            total += s * scale
            scale *= n
    return total


def path_at(ss: SelfSimilarKGraph, p: Sequence[int], r: int) -> Path:
    """Inverse of :func:`addr` on degree ``p``."""
    _require_po(ss)
    words = []
    for c, e in enumerate(p):
        n = ss.sizes[c]
        w = []
        for _ in range(e):
            r, s = divmod(r, n)
            w.append(s)
        words.append(tuple(w))
    return Path(tuple(words))


@dataclass
class PhiTable:
    p: tuple
    q: tuple
    forward: dict
    inverse: dict

    def __call__(self, mu: Path) -> Path:
        return self.forward[mu]


def phi_pq(ss: SelfSimilarKGraph, p: Sequence[int], q: Sequence[int], verify: bool = True) -> PhiTable:
    """Address-preserving bijection between degrees with ``n^p = n^q``."""
    _require_po(ss)
    p, q = tuple(p), tuple(q)
    if npow(ss, p) != npow(ss, q):
        raise DegreesNotEquivalent(f"n^{p} != n^{q}", p=p, q=q)
    fwd = {mu: path_at(ss, q, addr(ss, mu)) for mu in enumerate_paths(ss.graph, p)}
    inv = {v: k for k, v in fwd.items()}
    table = PhiTable(p, q, fwd, inv)
    if verify:
        for mu in fwd:
            for nu in enumerate_paths(ss.graph, q):
                if compose(ss.graph, mu, nu) != compose(ss.graph, fwd[mu], inv[nu]):
                    raise RelationFailed("mu nu != phi(mu) phi^-1(nu)", mu=str(mu), nu=str(nu))
                if compose(ss.graph, inv[nu], fwd[mu]) != compose(ss.graph, nu, mu):
                    raise RelationFailed("phi^-1(nu) phi(mu) != nu mu", mu=str(mu), nu=str(nu))
    return table


def solve_commuting_exponent(ss: SelfSimilarKGraph, mu: Path, nu: Path, m: int) -> int:
    """``l`` with ``nu a^m = a^l mu``."""
    _require_po(ss)
    if mu.degree != nu.degree:
        raise DegreesNotEquivalent("mu and nu must have equal degree", mu=str(mu), nu=str(nu))
    ell = m * npow(ss, mu.degree) + addr(ss, nu) - addr(ss, mu)
    moved, h = act_restrict(ss, ell, mu)
    if moved != nu or h != m:
        raise RelationFailed("commuting exponent check failed", mu=str(mu), nu=str(nu), m=m, l=ell)
    return ell


# ---------------------------------------------------------------------------
# cycline triples


@dataclass(frozen=True)
class CyclineTriple:
    mu: Path
    g: int
    nu: Path

    @property
    def trivial(self) -> bool:
        return self.g == 0 and self.mu == self.nu


@dataclass
class CyclineStructure:
    family: str
    description: str
    period: int | None = None
    lattice: RelationLattice | None = None
    _ss: SelfSimilarKGraph | None = field(default=None, repr=False)

    def contains(self, t: CyclineTriple) -> bool:
        if self.family in ("all", "lambda_one"):
            return True
        if self.family == "trivial":
            return t.trivial
        if self.family == "multiples":
            return t.mu == t.nu and t.g % self.period == 0
        if self.family == "product_odometers":
            ss = self._ss
            return (t.g == 0 and npow(ss, t.mu.degree) == npow(ss, t.nu.degree)
                    and addr(ss, t.mu) == addr(ss, t.nu))
        raise UnsupportedFamily(f"no structural cycline description for {self.family}")

    def to_json(self) -> dict:
        doc = {"family": self.family, "description": self.description}
        if self.period is not None:
            doc["period"] = self.period
        if self.lattice is not None:
            doc["lattice"] = self.lattice.to_json()
        return doc


def cycline_structure(ss: SelfSimilarKGraph) -> CyclineStructure:
    if ss.is_rank1:
        if ss.sizes[0] == 1:
            return CyclineStructure("all", "single edge: every triple (mu, a^l, nu) is cycline")
        if rank1_periodicity(ss).periodic:
            N = ss.orbit_lcm
            return CyclineStructure("multiples", f"(mu, a^(l*{N}), mu) for l in Z", period=N)
        return CyclineStructure("trivial", "aperiodic: only (mu, 0, mu)")
    if ss.is_lambda_one:
        return CyclineStructure("lambda_one", "one path per degree: every triple is cycline")
    if ss.is_product_odometers:
        lat = relation_lattice(ss.sizes)
        return CyclineStructure("product_odometers",
                                "(mu, 0, nu) with n^d(mu) = n^d(nu) and addr(mu) = addr(nu)",
                                lattice=lat, _ss=ss)
    raise UnsupportedFamily("cycline structure is only known for rank 1, Lambda(1, m) and Lambda_d(n, 1)",
                            family=ss.family)


@dataclass
class DepthVerdict:
    status: str  # "holds" or "falsified"
    depth: int
    checked: int
    exhaustive: bool
    witness: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.status == "holds"

    def to_json(self) -> dict:
        return {"status": self.status, "depth": self.depth, "checked": self.checked,
                "exhaustive": self.exhaustive, "witness": self.witness}


_TABLES = "_kernel_tables"


def kernel_tables(ss: SelfSimilarKGraph) -> _kernels.KernelTables:
    t = ss.__dict__.get(_TABLES)
    if t is None:
        t = _kernels.KernelTables(ss)
        ss.__dict__[_TABLES] = t
    return t


def _rank1_depth(ss, t: CyclineTriple, d: int):
    """Vectorized check at exactly depth ``d``; ``None`` when int64 might overflow."""
    tables = kernel_tables(ss)
    if not _kernels.fits_int64(tables, t.g, d):
        return None
    n = ss.sizes[0]
    rows = _kernels.rank1_rows(n, d)
    moved, _ = _kernels.act_rows(tables, t.g, rows)
    mu = np.asarray(t.mu.words[0], dtype=np.int64)
    nu = np.asarray(t.nu.words[0], dtype=np.int64)
    m = min(len(mu), len(nu)) + d
    left = np.concatenate([np.broadcast_to(mu, (rows.shape[0], len(mu))), moved], axis=1)[:, :m]
    right = np.concatenate([np.broadcast_to(nu, (rows.shape[0], len(nu))), rows], axis=1)[:, :m]
    bad = np.nonzero((left != right).any(axis=1))[0]
    if bad.size:
        w = tuple(int(x) for x in rows[bad[0]])
        return False, rows.shape[0], Path((w,))
    return True, rows.shape[0], None


def _python_depth(ss, t: CyclineTriple, d: int, cap: int, rng):
    graph = ss.graph
    D = dscale(d, ones(ss.k))
    m = meet(dadd(t.mu.degree, D), dadd(t.nu.degree, D))
    count = graph.count_paths(D)
    if count <= cap:
        words = enumerate_paths(graph, D)
        exhaustive = True
    else:
        words = [Path(tuple(tuple(rng.randrange(n) for _ in range(d)) for n in ss.sizes))
                 for _ in range(cap)]
        exhaustive = False
    for w in words:
        left = compose(graph, t.mu, act(ss, t.g, w))
        right = compose(graph, t.nu, w)
        if factorize(graph, left, m)[0] != factorize(graph, right, m)[0]:
            return False, len(words), w, exhaustive
    return True, len(words), None, exhaustive


def is_cycline_to_depth(ss: SelfSimilarKGraph, triple: CyclineTriple, D: int,
                        cap: int | None = None, seed: int = 0) -> DepthVerdict:
    """Check ``mu (g . w)`` against ``nu w`` on the common prefix degree for all ``w`` of degree ``D*1``.

    Depths ``1..D`` are tried in turn; a mismatch at a smaller depth persists
    at every larger one, so this only saves time.  Above ``cap`` words the
    check samples ``cap`` words with the given seed and says so.
    """
    cap = cap or ss.graph.cap
    rng = random.Random(seed)
    checked = 0
    exhaustive = True
    for d in range(1, D + 1):
        res = None
        if ss.is_rank1 and ss.sizes[0] ** d <= cap:
            res = _rank1_depth(ss, triple, d)
            if res is not None:
                ok, cnt, w = res
                ex = True
        if res is None:
            ok, cnt, w, ex = _python_depth(ss, triple, d, cap, rng)
        checked += cnt
        exhaustive = exhaustive and ex
        if not ok:
            return DepthVerdict("falsified", d, checked, exhaustive, {"w": str(w), "depth": d})
    return DepthVerdict("holds", D, checked, exhaustive)


def triples_upto(ss: SelfSimilarKGraph, top: Sequence[int], gmax: int):
    """All ``(mu, g, nu)`` with ``d(mu), d(nu) <= top`` and ``|g| <= gmax``."""
    paths = [p for n in degrees_upto(tuple(top)) for p in enumerate_paths(ss.graph, n)]
    for mu in paths:
        for nu in paths:
            for g in range(-gmax, gmax + 1):
                yield CyclineTriple(mu, g, nu)


def periodicity_search(ss: SelfSimilarKGraph, depth: int = 5, gmax: int | None = None,
                       path_degree: int = 1):
    """Brute-force search for a nontrivial triple holding to ``depth``.

    Returns the first witness (small ``|g|`` first) or ``None``.
    """
    gmax = gmax if gmax is not None else 2 * max(ss.sizes)
    top = dscale(path_degree, ones(ss.k))
    paths = [p for n in degrees_upto(top) for p in enumerate_paths(ss.graph, n)]
    order = sorted(range(-gmax, gmax + 1), key=lambda g: (abs(g), g))
    for g in order:
        for mu in paths:
            for nu in paths:
                t = CyclineTriple(mu, g, nu)
                if t.trivial:
                    continue
                if is_cycline_to_depth(ss, t, depth):
                    return t
    return None


# ---------------------------------------------------------------------------
# structure report


@dataclass
class StructureReport:
    family: str
    pseudo_free: bool
    periodic: bool | None
    simple: bool | None
    kirchberg: bool | None
    reasons: dict
    orbits: list
    lattice: RelationLattice | None = None
    cycline: dict | None = None

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "pseudo_free": self.pseudo_free,
            "periodic": self.periodic,
            "simple": self.simple,
            "kirchberg": self.kirchberg,
            "reasons": self.reasons,
            "orbits": [{"color": c, "n": n, "m": m} for c, n, m in self.orbits],
            "lattice": None if self.lattice is None else self.lattice.to_json(),
            "cycline": self.cycline,
        }

    def to_text(self) -> str:
        def fmt(v):
            return "undetermined" if v is None else str(v).lower()

        rows = [("family", self.family), ("pseudo_free", fmt(self.pseudo_free)),
                ("periodic", fmt(self.periodic)), ("simple", fmt(self.simple)),
                ("kirchberg", fmt(self.kirchberg))]
        if self.lattice is not None:
            rows.append(("lattice", str([list(b) for b in self.lattice.basis])))
        if self.cycline is not None:
            rows.append(("cycline", self.cycline["description"]))
        width = max(len(k) for k, _ in rows)
        out = [f"{k.ljust(width)} : {v}" for k, v in rows]
        for key, why in self.reasons.items():
            out.append(f"  {key}: {why}")
        return "\n".join(out)


def simplicity_report(ss: SelfSimilarKGraph) -> StructureReport:
    from .selfsim import is_pseudo_free

    pf = is_pseudo_free(ss)
    reasons = {"pseudo_free": pf.reason}
    lattice = None
    if ss.is_rank1:
        v = rank1_periodicity(ss)
        periodic = v.periodic
        simple = not periodic
        kirchberg = simple
        reasons["periodic"] = v.reason
        reasons["simple"] = "simple iff some n_i does not divide m_i"
        reasons["kirchberg"] = "rank 1: Kirchberg iff simple"
    elif ss.is_product_odometers:
        lattice = relation_lattice(ss.sizes)
        periodic = not lattice.independent
        simple = lattice.independent
        kirchberg = False if not simple else None
        reasons["periodic"] = ("sizes multiplicatively independent" if simple
                               else f"relation {list(lattice.basis[0])} among the sizes")
        reasons["simple"] = "simple iff the sizes are multiplicatively independent"
        reasons["kirchberg"] = ("not simple" if not simple
                                else "not decided for rank >= 2 (outside the decision procedures)")
    elif ss.is_lambda_one:
        periodic = True
        simple = False
        kirchberg = False
        reasons["periodic"] = "one path per degree: (mu, a, mu) is a nontrivial cycline triple"
        reasons["simple"] = "periodic, hence not simple"
        reasons["kirchberg"] = "not simple"
    else:
        raise UnsupportedFamily("no decision procedure for this family", family=ss.family)
    try:
        cyc = cycline_structure(ss).to_json()
    except UnsupportedFamily:
        cyc = None
    return StructureReport(ss.family, bool(pf), periodic, simple, kirchberg, reasons,
                           ss.orbit_data, lattice, cyc)


# ---------------------------------------------------------------------------
# affine model


@dataclass(frozen=True)
class AffineElement:
    """``x -> scale*x + shift`` over the rationals; ``f * g`` means ``f`` after ``g``."""

    scale: Fraction
    shift: Fraction

    def __post_init__(self):
        object.__setattr__(self, "scale", Fraction(self.scale))
        object.__setattr__(self, "shift", Fraction(self.shift))
        if self.scale == 0:
            raise ValueError("affine scale must be nonzero")

    def __mul__(self, other: "AffineElement") -> "AffineElement":
        return AffineElement(self.scale * other.scale, self.scale * other.shift + self.shift)

    def inverse(self) -> "AffineElement":
        return AffineElement(1 / self.scale, -self.shift / self.scale)

    def __pow__(self, n: int) -> "AffineElement":
        base = self if n >= 0 else self.inverse()
        out = AffineElement(1, 0)
        for _ in range(abs(n)):
            out = out * base
        return out

    def __call__(self, x):
        return self.scale * x + self.shift

    def __str__(self) -> str:
        return f"x -> {self.scale}*x + {self.shift}"


def affine_presentation_check(p: int, q: int) -> dict:
    """Verify the affine realization of ``<s, t, z : st = ts, sz = z^p s, tz = z^q t>``
    and the digit relations ``e_k f_l = f_l' e_k'`` with ``k + l p = l' + k' q``.
    """
    if p < 2 or q < 2:
        raise ValueError("p and q must be >= 2")
    z = AffineElement(1, 1)
    s = AffineElement(p, 0)
    t = AffineElement(q, 0)
    checks = []

    def check(name, lhs, rhs, **wit):
        ok = lhs == rhs
        checks.append({"relation": name, "ok": ok, "lhs": str(lhs), "rhs": str(rhs), **wit})
        if not ok:
            raise RelationFailed(f"{name} fails", relation=name, lhs=str(lhs), rhs=str(rhs), **wit)

    check("st = ts", s * t, t * s)
    check("sz = z^p s", s * z, z ** p * s)
    check("tz = z^q t", t * z, z ** q * t)
    theta = make_theta("division", (p, q))
    digits = []
    for k in range(p):
        for ell in range(q):
            # k + ell p = ell' + k' q
            kk, ll = divmod(k + ell * p, q)
            if theta(0, 1, k, ell) != (kk, ll):
                raise RelationFailed("digit identity disagrees with the division table",
                                     k=k, l=ell, digits=(kk, ll), table=theta(0, 1, k, ell))
            e_k = z ** k * s
            f_l = z ** ell * t
            check(f"e_{k} f_{ell} = f_{ll} e_{kk}", e_k * f_l, z ** ll * t * (z ** kk * s),
                  k=k, l=ell, k2=kk, l2=ll)
            digits.append([k, ell, kk, ll])
    return {"p": p, "q": q, "ok": True, "checks": checks, "digits": digits,
            "mixed_relations": p * q}
