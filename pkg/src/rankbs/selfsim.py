"""Self-similar Z-actions on single-vertex k-graphs.

Only the generator data ``a . x^i_s = x^i_{sigma_i(s)}`` and
``a|_{x^i_s} = a^{rho_i(s)}`` is stored.  Powers are evaluated per orbit in
closed form: for an orbit of length ``L`` and restriction sum ``m``, writing
``g = l*L + p`` with ``0 <= p < L``,

    a^g . orbit[q]  = orbit[(q + p) mod L]
    a^g |_orbit[q]  = l*m + sum_{r < p} rho(orbit[q + r])

which holds for every integer ``g`` (negative ones included) because both
sides satisfy the cocycle law and agree at ``g = 1``.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import (
    ActCompatibilityViolated,
    AxiomViolated,
    NonBijectiveSigma,
    RankBSError,
    ZeroRestrictionSum,
)
from .kgraph import (
    _split_sorted as _split,
    KGraph,
    Path,
    compose,
    degrees_upto,
    dscale,
    enumerate_paths,
    factorize,
    make_theta,
    ones,
    validate_kgraph,
)


@dataclass(frozen=True)
class EdgeActionSpec:
    """Per-color permutation ``sigma[c][s] = a.s`` and restriction exponents ``rho[c][s]``."""

    sigma: tuple
    rho: tuple

    @classmethod
    def build(cls, sigma, rho) -> "EdgeActionSpec":
        return cls(tuple(tuple(int(x) for x in row) for row in sigma),
                   tuple(tuple(int(x) for x in row) for row in rho))


@dataclass(frozen=True)
class Orbit:
    color: int  # 0-based
    members: tuple  # members[q+1] == sigma(members[q])
    rho: tuple  # rho of each member, aligned with members
    prefix: tuple  # prefix[r] = sum of rho over the first r members of the doubled orbit

    @property
    def length(self) -> int:
        return len(self.members)

    @property
    def total(self) -> int:
        return self.prefix[self.length]


class SelfSimilarKGraph:
    """A validated self-similar action of Z on a single-vertex k-graph."""

    def __init__(self, graph: KGraph, spec: EdgeActionSpec, label: str = "explicit", params=None):
        self.graph = graph
        self.spec = spec
        self.k = graph.k
        self.sizes = graph.sizes
        self.label = label
        self.params = params or {}
        self.orbits = []  # per color: list of Orbit
        self._where = []  # per color: letter -> (Orbit, position)
        for c in range(self.k):
            sig, rho = spec.sigma[c], spec.rho[c]
            seen = [False] * self.sizes[c]
            orbs = []
            where = [None] * self.sizes[c]
            for start in range(self.sizes[c]):
                if seen[start]:
                    continue
                members = []
                s = start
                while not seen[s]:
                    seen[s] = True
                    members.append(s)
                    s = sig[s]
                rh = tuple(rho[s] for s in members)
                pre = [0]
                for v in rh + rh:
                    pre.append(pre[-1] + v)
                orb = Orbit(c, tuple(members), rh, tuple(pre))
                for q, s in enumerate(members):
                    where[s] = (orb, q)
                orbs.append(orb)
            self.orbits.append(tuple(orbs))
            self._where.append(tuple(where))
        self._cache = {}

    def __repr__(self) -> str:
        return f"SelfSimilarKGraph({self.label}, sizes={self.sizes})"

    # -- derived invariants ------------------------------------------------
    @property
    def all_orbits(self) -> list:
        return [o for per in self.orbits for o in per]

    @property
    def orbit_data(self) -> list:
        """``(color, n, m)`` per orbit, colors 1-based."""
        return [(o.color + 1, o.length, o.total) for o in self.all_orbits]

    @property
    def frak_N(self) -> int:
        """Product of all orbit lengths."""
        return math.prod(o.length for o in self.all_orbits)

    @property
    def orbit_lcm(self) -> int:
        """Smallest ``N > 0`` with ``a^N`` fixing every edge."""
        return math.lcm(*(o.length for o in self.all_orbits))

    @property
    def frak_n(self) -> tuple:
        return self.sizes

    @property
    def frak_m(self):
        """Restriction vector when every color is a single fixed edge, else ``None``."""
        if self.is_lambda_one:
            return tuple(self.spec.rho[c][0] for c in range(self.k))
        return None

    @property
    def frak_M(self):
        m = self.frak_m
        return None if m is None else math.prod(m)

    @property
    def is_rank1(self) -> bool:
        return self.k == 1

    @property
    def is_lambda_one(self) -> bool:
        return all(n == 1 for n in self.sizes)

    @functools.cached_property
    def is_product_odometers(self) -> bool:
        div = make_theta("division", self.sizes)
        if div.tables != self.graph.theta.tables:
            return False
        for c, n in enumerate(self.sizes):
            if self.spec.sigma[c] != tuple((s + 1) % n for s in range(n)):
                return False
            if self.spec.rho[c] != tuple(1 if s == n - 1 else 0 for s in range(n)):
                return False
        return True

    @property
    def family(self) -> str:
        if self.is_product_odometers:
            return "product_odometers"
        if self.is_lambda_one:
            return "lambda_one"
        if self.is_rank1:
            return "rank1"
        return "general"

    @property
    def zero_sum_orbits(self) -> list:
        return [o for o in self.all_orbits if o.total == 0]

    @property
    def nonnegative(self) -> bool:
        return all(r >= 0 for row in self.spec.rho for r in row)

    # -- edge level ---------------------------------------------------------
    def edge_act(self, c: int, s: int, g: int) -> tuple:
        """``(a^g . x^c_s, exponent of a^g|_{x^c_s})`` for 0-based color ``c``."""
        orb, q = self._where[c][s]
        L = orb.length
        l, p = divmod(g, L)
        return orb.members[(q + p) % L], l * orb.total + orb.prefix[q + p] - orb.prefix[q]

    def to_json(self) -> dict:
        doc = {"kind": self.label}
        doc.update(self.params)
        if self.label == "explicit":
            doc["graph"] = {"k": self.k, "sizes": list(self.sizes), "theta": self.graph.theta.to_json()}
            doc["sigma"] = [list(r) for r in self.spec.sigma]
            doc["rho"] = [list(r) for r in self.spec.rho]
        return doc


# ---------------------------------------------------------------------------
# action on paths

def act_restrict(ss: SelfSimilarKGraph, g: int, p: Path) -> tuple:
    """``(a^g . p, exponent of a^g|_p)`` evaluated letter by letter on the normal form."""
    if g == 0 or p.is_empty():
        return p, g
    key = (g, p)
    hit = ss._cache.get(key)
    if hit is not None:
        return hit
    words = []
    h = g
    for c, w in enumerate(p.words):
        out = []
        for s in w:
            s2, h = ss.edge_act(c, s, h)
            out.append(s2)
        words.append(tuple(out))
    res = (Path(tuple(words)), h)
    if len(ss._cache) < 1_000_000:
        ss._cache[key] = res
    return res


def act(ss: SelfSimilarKGraph, g: int, p: Path) -> Path:
    return act_restrict(ss, g, p)[0]


def restrict(ss: SelfSimilarKGraph, g: int, p: Path) -> int:
    return act_restrict(ss, g, p)[1]


def act_by_iteration(ss: SelfSimilarKGraph, g: int, p: Path) -> tuple:
    """Reference evaluation by repeated application of ``a`` or ``a^{-1}`` per letter."""
    inv = []
    for c in range(ss.k):
        row = [0] * ss.sizes[c]
        for s, t in enumerate(ss.spec.sigma[c]):
            row[t] = s
        inv.append(row)
    words = []
    h = g
    for c, w in enumerate(p.words):
        out = []
        for s in w:
            r = 0
            if h >= 0:
                for _ in range(h):
                    r += ss.spec.rho[c][s]
                    s = ss.spec.sigma[c][s]
            else:
                for _ in range(-h):
                    s = inv[c][s]
                    r -= ss.spec.rho[c][s]
            out.append(s)
            h = r
        words.append(tuple(out))
    return Path(tuple(words)), h


# ---------------------------------------------------------------------------
# validation

def _letter_word_act(ss: SelfSimilarKGraph, g: int, letters) -> tuple:
    out = []
    for c, s in letters:
        s2, g = ss.edge_act(c, s, g)
        out.append((c, s2))
    return out, g


def validate_selfsim(graph: KGraph, spec, label: str = "explicit", params=None,
                     axiom_degree=None, axiom_g: int = 8, axiom_budget: int = 20000) -> SelfSimilarKGraph:
    """Check sigma bijectivity, the swap compatibility of the generator data
    (paths and restrictions), then spot-check the path-level axioms.

    The axiom sweep covers degrees up to ``axiom_degree`` (default ``2*1_k``)
    and ``|g| <= axiom_g``.  Degrees with more than ``axiom_budget`` paths are
    sampled with a fixed stride rather than skipped.
    """
    if not isinstance(spec, EdgeActionSpec):
        spec = EdgeActionSpec.build(spec["sigma"], spec["rho"])
    k = graph.k
    if len(spec.sigma) != k or len(spec.rho) != k:
        raise RankBSError("action spec needs one sigma and one rho table per color")
    for c in range(k):
        n = graph.sizes[c]
        if len(spec.sigma[c]) != n or len(spec.rho[c]) != n:
            raise RankBSError(f"action tables for color {c + 1} must have length {n}")
        if sorted(spec.sigma[c]) != list(range(n)):
            raise NonBijectiveSigma(f"sigma for color {c + 1} is not a permutation of [{n}]",
                                    i=c + 1, sigma=spec.sigma[c])
    ss = SelfSimilarKGraph(graph, spec, label, params)
    for i in range(k):
        for j in range(i + 1, k):
            for s in range(graph.sizes[i]):
                for t in range(graph.sizes[j]):
                    swapped = list(graph.swap((i, s), (j, t)))
                    lhs, rl = _letter_word_act(ss, 1, [(i, s), (j, t)])
                    rhs, rr = _letter_word_act(ss, 1, swapped)
                    pl = graph.sort_letters(lhs)
                    pr = graph.sort_letters(rhs)
                    if pl != pr or rl != rr:
                        raise ActCompatibilityViolated(
                            f"a does not respect x{i + 1}[{s}] x{j + 1}[{t}] = "
                            f"x{j + 1}[{swapped[0][1]}] x{i + 1}[{swapped[1][1]}]",
                            i=i + 1, j=j + 1, s=s, t=t,
                            lhs={"path": str(_split(k, pl)), "restriction": rl},
                            rhs={"path": str(_split(k, pr)), "restriction": rr})
    _axiom_sweep(ss, axiom_degree or dscale(2, ones(k)), axiom_g, axiom_budget)
    return ss


def _axiom_sweep(ss: SelfSimilarKGraph, top, gmax: int, budget: int) -> None:
    graph = ss.graph
    gs = range(-gmax, gmax + 1)
    for n in degrees_upto(top):
        if graph.count_paths(n) > graph.cap:
            continue
        paths = enumerate_paths(graph, n)
        stride = max(1, len(paths) // budget)
        for p in paths[::stride]:
            for split in degrees_upto(n):
                if split == n or not any(split):
                    continue  # an empty factor makes the identity trivial
                q, r = factorize(graph, p, split)
                for g in gs:
                    whole, gw = act_restrict(ss, g, p)
                    aq, gq = act_restrict(ss, g, q)
                    ar, gr = act_restrict(ss, gq, r)
                    if compose(graph, aq, ar) != whole or gr != gw:
                        raise AxiomViolated("action is not factorization independent",
                                            g=g, path=str(p), prefix=str(q))


# ---------------------------------------------------------------------------
# constructors

def _rank1_graph(n: int) -> KGraph:
    return validate_kgraph(1, (n,), "trivial")


def make_odometer(n: int, m: int) -> SelfSimilarKGraph:
    """The (n, m)-odometer E(n, m)."""
    if n < 1:
        raise RankBSError("n must be >= 1", n=n)
    if m == 0:
        raise ZeroRestrictionSum("odometer restriction m must be nonzero", i=1, n=n, m=m)
    spec = EdgeActionSpec.build([[(s + 1) % n for s in range(n)]],
                                [[m if s == n - 1 else 0 for s in range(n)]])
    return validate_selfsim(_rank1_graph(n), spec, "odometer", {"n": n, "m": m})


def make_bs(n: int, m: int) -> SelfSimilarKGraph:
    """BS+(n, m) is presented by the odometer E(n, m)."""
    return make_odometer(n, m)


def make_gbs(orbit_list: Sequence) -> SelfSimilarKGraph:
    """Disjoint union of cyclic orbits ``(n_i, rho table)``; letters laid out orbit by orbit."""
    sigma, rho = [], []
    off = 0
    norm = []
    for i, (n, table) in enumerate(orbit_list, start=1):
        n = int(n)
        table = [int(x) for x in table]
        if len(table) != n:
            raise RankBSError(f"orbit {i}: restriction table must have length {n}")
        if sum(table) == 0:
            raise ZeroRestrictionSum(f"orbit {i} has restriction sum 0 (not pseudo-free)",
                                     i=i, n=n, rho=table)
        sigma.extend(off + (s + 1) % n for s in range(n))
        rho.extend(table)
        norm.append([n, table])
        off += n
    if off == 0:
        raise RankBSError("at least one orbit is required")
    spec = EdgeActionSpec.build([sigma], [rho])
    return validate_selfsim(_rank1_graph(off), spec, "gbs", {"orbits": norm})


def make_odometer_family(theta_kind: str, pairs: Sequence) -> SelfSimilarKGraph:
    """One (n_i, m_i)-odometer per color over a named commutation family."""
    sizes = tuple(int(n) for n, _ in pairs)
    for i, (n, m) in enumerate(pairs, start=1):
        if m == 0:
            raise ZeroRestrictionSum(f"color {i} restriction m must be nonzero", i=i, n=n, m=m)
    graph = validate_kgraph(len(sizes), sizes, theta_kind)
    spec = EdgeActionSpec.build([[(s + 1) % n for s in range(n)] for n in sizes],
                                [[m if s == n - 1 else 0 for s in range(n)] for n, m in pairs])
    return validate_selfsim(graph, spec, "odometers",
                            {"theta": theta_kind, "pairs": [[int(n), int(m)] for n, m in pairs]})


def make_product_of_odometers(sizes: Sequence[int]) -> SelfSimilarKGraph:
    """Lambda_d(n, 1): division commutation with an (n_i, 1)-odometer per color."""
    sizes = tuple(int(n) for n in sizes)
    if any(n < 1 for n in sizes):
        raise RankBSError("sizes must be >= 1", sizes=sizes)
    graph = validate_kgraph(len(sizes), sizes, "division")
    spec = EdgeActionSpec.build([[(s + 1) % n for s in range(n)] for n in sizes],
                                [[1 if s == n - 1 else 0 for s in range(n)] for n in sizes])
    return validate_selfsim(graph, spec, "product_odometers", {"sizes": list(sizes)})


def make_lambda_one(m: Sequence[int]) -> SelfSimilarKGraph:
    """Lambda(1, m): one edge per color, ``a|_{x_i} = a^{m_i}``."""
    m = tuple(int(x) for x in m)
    for i, x in enumerate(m, start=1):
        if x == 0:
            raise ZeroRestrictionSum(f"m_{i} must be nonzero", i=i, m=m)
    k = len(m)
    graph = validate_kgraph(k, (1,) * k, "trivial")
    spec = EdgeActionSpec.build([[0]] * k, [[x] for x in m])
    return validate_selfsim(graph, spec, "lambda_one", {"m": list(m)})


def make_trivial_action(graph: KGraph) -> SelfSimilarKGraph:
    """Fixes every edge with restriction ``a``; its ``g = 0`` monomials span the plain k-graph algebra."""
    spec = EdgeActionSpec.build([list(range(n)) for n in graph.sizes], [[1] * n for n in graph.sizes])
    return validate_selfsim(graph, spec, "trivial_action",
                            {"graph": {"k": graph.k, "sizes": list(graph.sizes),
                                       "theta": graph.theta.to_json()}})


def from_json(doc: Mapping, cap=None) -> SelfSimilarKGraph:
    """Build from an action spec document (see README for the schema)."""
    kind = doc.get("kind")
    try:
        if kind == "odometer" or kind == "bs":
            return make_odometer(int(doc["n"]), int(doc["m"]))
        if kind == "gbs":
            return make_gbs([(o[0], o[1]) for o in doc["orbits"]])
        if kind == "product_odometers":
            return make_product_of_odometers(doc["sizes"])
        if kind == "lambda_one":
            return make_lambda_one(doc["m"])
        if kind == "odometers":
            return make_odometer_family(doc["theta"], [tuple(p) for p in doc["pairs"]])
        if kind == "trivial_action":
            g = doc["graph"]
            return make_trivial_action(validate_kgraph(int(g["k"]), g["sizes"], g["theta"]))
        if kind == "explicit":
            g = doc["graph"]
            theta = g["theta"]
            if isinstance(theta, Mapping):
                theta = theta["tables"]
            graph = validate_kgraph(int(g["k"]), g["sizes"], theta, **({"cap": cap} if cap else {}))
            return validate_selfsim(graph, EdgeActionSpec.build(doc["sigma"], doc["rho"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise RankBSError(f"malformed action spec: {exc}") from exc
    raise RankBSError(f"unknown action kind {kind!r}")


# ---------------------------------------------------------------------------
# pseudo-freeness

@dataclass
class PseudoFreeVerdict:
    status: str  # "true", "falsified" or "unknown"
    reason: str
    witness: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.status == "true"

    def to_json(self) -> dict:
        return {"status": self.status, "reason": self.reason, "witness": self.witness}


def is_pseudo_free(ss: SelfSimilarKGraph, depth: int = 3) -> PseudoFreeVerdict:
    """Exact verdict from orbit sums.

    If every orbit has a nonzero restriction sum, ``a^g`` fixing an edge forces
    ``g`` to be a multiple of the orbit length, hence a nonzero restriction; an
    induction along the path finishes.  A zero-sum orbit of length ``L`` gives
    the witness ``g = L`` on any of its edges.  ``depth`` only bounds the
    optional search cross-check in :func:`pseudo_free_search`.
    """
    bad = ss.zero_sum_orbits
    if not bad:
        return PseudoFreeVerdict("true", "every orbit has nonzero restriction sum")
    o = bad[0]
    e = Path.edge(ss.k, o.color, o.members[0])
    return PseudoFreeVerdict("falsified", f"orbit of color {o.color + 1} has restriction sum 0",
                             {"g": o.length, "mu": str(e), "color": o.color + 1,
                              "letters": list(o.members)})


def pseudo_free_search(ss: SelfSimilarKGraph, depth: int, gbound: int) -> PseudoFreeVerdict:
    """Bounded search for ``g != 0`` and ``mu`` with ``g.mu = mu`` and ``g|_mu = 0``."""
    for n in degrees_upto(dscale(depth, ones(ss.k))):
        if ss.graph.count_paths(n) > ss.graph.cap:
            continue
        for mu in enumerate_paths(ss.graph, n):
            for g in itertools.chain(range(1, gbound + 1), range(-1, -gbound - 1, -1)):
                img, h = act_restrict(ss, g, mu)
                if img == mu and h == 0:
                    return PseudoFreeVerdict("falsified", "search found a fixed path with trivial restriction",
                                             {"g": g, "mu": str(mu)})
    return PseudoFreeVerdict("unknown", f"no violation with degree <= {depth}*1 and |g| <= {gbound}")


def odometer_formula_oracle(n: int, m: int, g: int, s: int) -> tuple:
    """Closed form for E(n, m): ``(a^g . e_s, exponent of a^g|_{e_s})``.

    With ``g = l*n + p``, ``0 <= p < n``: the edge is ``e_{(s+p) mod n}`` and the
    exponent is ``l*m`` plus ``m`` exactly when the ``p`` steps wrap past ``e_{n-1}``.
    """
    l, p = divmod(g, n)
    return (s + p) % n, l * m + (m if s + p >= n else 0)
