"""Single-vertex rank-k graphs presented by theta-commutation tables.

Colors are 0-based internally (``Path.words[0]`` is color 1).  The public
colored-word interface (:func:`normalize_word`) uses 1-based colors so that
``(2, 0)`` reads as ``x^2_0``.

A theta table for colors ``i < j`` maps ``(s, t) -> (s', t')`` meaning
``x^i_s x^j_t = x^j_{t'} x^i_{s'}``.  Only this orientation is stored; the
reverse lookup is derived on construction.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import (
    CubicConditionViolated,
    DegreeTooLarge,
    FlipSizeMismatch,
    LetterOutOfRange,
    NonBijectiveTheta,
    RankBSError,
    SizeOverflow,
)

DEFAULT_CAP = 10**6

Degree = tuple  # tuple[int, ...] in N^k (or Z^k for gauge degrees)


# ---------------------------------------------------------------------------
# degree arithmetic

def zero(k: int) -> Degree:
    return (0,) * k


def ones(k: int) -> Degree:
    return (1,) * k


def unit(k: int, i: int) -> Degree:
    """Standard basis vector for 0-based color ``i``."""
    return tuple(1 if c == i else 0 for c in range(k))


def dadd(a: Degree, b: Degree) -> Degree:
    return tuple(x + y for x, y in zip(a, b))


def dsub(a: Degree, b: Degree) -> Degree:
    return tuple(x - y for x, y in zip(a, b))


def dscale(c: int, a: Degree) -> Degree:
    return tuple(c * x for x in a)


def join(a: Degree, b: Degree) -> Degree:
    return tuple(max(x, y) for x, y in zip(a, b))


def meet(a: Degree, b: Degree) -> Degree:
    return tuple(min(x, y) for x, y in zip(a, b))


def dle(a: Degree, b: Degree) -> bool:
    return all(x <= y for x, y in zip(a, b))


def degrees_upto(bound: Degree) -> list[Degree]:
    """All degrees ``n <= bound`` in lexicographic order."""
    return [tuple(t) for t in itertools.product(*(range(b + 1) for b in bound))]


# ---------------------------------------------------------------------------
# theta families

@dataclass(frozen=True)
class ThetaFamily:
    """Commutation data: ``tables[(i, j)][s][t] == (s', t')`` for 0-based ``i < j``."""

    k: int
    sizes: tuple
    tables: tuple  # tuple of ((i, j), table) sorted by (i, j)
    kind: str = "explicit"

    def table(self, i: int, j: int):
        for key, tab in self.tables:
            if key == (i, j):
                return tab
        raise KeyError((i, j))

    def __call__(self, i: int, j: int, s: int, t: int) -> tuple:
        return self.table(i, j)[s][t]

    @classmethod
    def from_tables(cls, sizes: Sequence[int], tables, kind: str = "explicit") -> "ThetaFamily":
        """Build from user tables.

        ``tables`` is either a mapping keyed by 1-based color pairs ``(i, j)``
        or a list of tables ordered by the pairs ``(1,2), (1,3), ..., (k-1,k)``.
        Each table is nested ``[n_i][n_j] -> (s', t')`` or flat row-major
        ``[n_i * n_j] -> (s', t')``.
        """
        sizes = tuple(int(n) for n in sizes)
        k = len(sizes)
        pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
        if isinstance(tables, Mapping):
            raw = {(int(i) - 1, int(j) - 1): tab for (i, j), tab in tables.items()}
        else:
            tables = list(tables)
            if len(tables) != len(pairs):
                raise RankBSError(f"expected {len(pairs)} theta tables, got {len(tables)}")
            raw = dict(zip(pairs, tables))
        out = []
        for i, j in pairs:
            if (i, j) not in raw:
                raise RankBSError(f"missing theta table for colors ({i + 1},{j + 1})")
            out.append(((i, j), _shape_table(raw[(i, j)], sizes[i], sizes[j], i, j)))
        return cls(k, sizes, tuple(out), kind)

    def to_json(self):
        if self.kind in ("trivial", "division", "flip"):
            return self.kind
        return {"tables": [[list(e) for row in tab for e in row] for _, tab in self.tables]}


def _shape_table(tab, ni: int, nj: int, i: int, j: int):
    tab = list(tab)
    if len(tab) == ni and all(isinstance(r, (list, tuple)) and len(r) == nj
                              and all(isinstance(e, (list, tuple)) for e in r) for r in tab):
        rows = [[tuple(int(x) for x in e) for e in r] for r in tab]
    elif len(tab) == ni * nj:
        rows = [[tuple(int(x) for x in tab[s * nj + t]) for t in range(nj)] for s in range(ni)]
    else:
        raise RankBSError(f"theta table ({i + 1},{j + 1}) has wrong shape; expected {ni}x{nj}")
    for r in rows:
        for e in r:
            if len(e) != 2 or not (0 <= e[0] < ni and 0 <= e[1] < nj):
                raise RankBSError(f"theta table ({i + 1},{j + 1}) entry {e} out of range")
    return tuple(tuple(r) for r in rows)


def make_theta(kind: str, sizes: Sequence[int]) -> ThetaFamily:
    """Named commutation families: ``trivial``, ``division`` or ``flip``."""
    sizes = tuple(int(n) for n in sizes)
    if any(n < 1 for n in sizes):
        raise RankBSError("sizes must be >= 1", sizes=sizes)
    k = len(sizes)
    if kind == "flip" and len(set(sizes)) > 1:
        raise FlipSizeMismatch("flip commutation needs equal sizes", sizes=sizes)
    if kind not in ("trivial", "division", "flip"):
        raise RankBSError(f"unknown theta kind {kind!r}")
    out = []
    for i in range(k):
        for j in range(i + 1, k):
            ni, nj = sizes[i], sizes[j]
            rows = []
            for s in range(ni):
                row = []
                for t in range(nj):
                    if kind == "trivial":
                        row.append((s, t))
                    elif kind == "flip":
                        row.append((t, s))
                    else:
                        # s + t*n_i = t' + s'*n_j
                        s2, t2 = divmod(s + t * ni, nj)
                        row.append((s2, t2))
                rows.append(tuple(row))
            out.append(((i, j), tuple(rows)))
    return ThetaFamily(k, sizes, tuple(out), kind)


# ---------------------------------------------------------------------------
# paths

@dataclass(frozen=True, order=True)
class Path:
    """A morphism in color-ordered normal form ``x^1_{u_1} ... x^k_{u_k}``."""

    words: tuple

    def __hash__(self):
        # paths are dictionary keys in every cache; hash once
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash(self.words)
            object.__setattr__(self, "_hash", h)
        return h

    @functools.cached_property
    def degree(self) -> Degree:
        return tuple(len(w) for w in self.words)

    @property
    def k(self) -> int:
        return len(self.words)

    def __len__(self) -> int:
        return sum(len(w) for w in self.words)

    def letters(self) -> list:
        return [(c, s) for c, w in enumerate(self.words) for s in w]

    def is_empty(self) -> bool:
        return not any(self.words)

    @classmethod
    def empty(cls, k: int) -> "Path":
        return cls(((),) * k)

    @classmethod
    def edge(cls, k: int, color: int, letter: int) -> "Path":
        """Single edge of 0-based ``color``."""
        return cls(tuple((letter,) if c == color else () for c in range(k)))

    def __str__(self) -> str:
        if self.is_empty():
            return "()"
        parts = []
        for c, w in enumerate(self.words):
            parts.extend(f"x{c + 1}[{s}]" for s in w)
        return " ".join(parts)

    def to_json(self) -> dict:
        if all(s < 10 for w in self.words for s in w):
            return {"words": ["".join(str(s) for s in w) for w in self.words]}
        return {"words": [list(w) for w in self.words]}

    @classmethod
    def from_json(cls, doc) -> "Path":
        words = doc["words"] if isinstance(doc, Mapping) else doc
        out = []
        for w in words:
            if isinstance(w, str):
                out.append(tuple(int(ch) for ch in w))
            else:
                out.append(tuple(int(x) for x in w))
        return cls(tuple(out))


def _split_sorted(k: int, letters: Iterable) -> Path:
    words = [[] for _ in range(k)]
    for c, s in letters:
        words[c].append(s)
    return Path(tuple(tuple(w) for w in words))


# ---------------------------------------------------------------------------
# graphs

class KGraph:
    """A validated single-vertex k-graph.  Build with :func:`validate_kgraph`."""

    def __init__(self, theta: ThetaFamily, cap: int = DEFAULT_CAP):
        self.theta = theta
        self.k = theta.k
        self.sizes = theta.sizes
        self.cap = cap
        self._fwd = {}
        self._bwd = {}
        for (i, j), tab in theta.tables:
            fwd = {}
            bwd = {}
            for s in range(self.sizes[i]):
                for t in range(self.sizes[j]):
                    s2, t2 = tab[s][t]
                    fwd[(s, t)] = (s2, t2)
                    bwd[(t2, s2)] = (s, t)
            self._fwd[(i, j)] = fwd
            self._bwd[(i, j)] = bwd
        self._compose_cache = {}
        self._enum_cache = {}
        self._mce_cache = {}

    def __repr__(self) -> str:
        return f"KGraph(k={self.k}, sizes={self.sizes}, theta={self.theta.kind})"

    @property
    def edge_counts(self) -> tuple:
        return self.sizes

    def count_paths(self, n: Degree) -> int:
        return math.prod(s ** e for s, e in zip(self.sizes, n))

    def swap(self, a: tuple, b: tuple) -> tuple:
        """Rewrite the adjacent pair ``a b`` of distinct colors as ``b' a'``."""
        (c1, x), (c2, y) = a, b
        if c1 < c2:
            s2, t2 = self._fwd[(c1, c2)][(x, y)]
            return (c2, t2), (c1, s2)
        s, t = self._bwd[(c2, c1)][(x, y)]
        return (c2, s), (c1, t)

    def sort_letters(self, letters: list) -> list:
        """Adjacent-swap (bubble) rewriting into ascending color order."""
        letters = list(letters)
        n = len(letters)
        for end in range(n - 1, 0, -1):
            moved = False
            for p in range(end):
                if letters[p][0] > letters[p + 1][0]:
                    letters[p], letters[p + 1] = self.swap(letters[p], letters[p + 1])
                    moved = True
            if not moved:
                break
        return letters

    def path(self, *words) -> Path:
        """Convenience constructor from per-color words (lists or digit strings)."""
        if len(words) != self.k:
            raise RankBSError(f"expected {self.k} words, got {len(words)}")
        out = []
        for c, w in enumerate(words):
            w = tuple(int(ch) for ch in w) if isinstance(w, str) else tuple(w)
            for s in w:
                if not 0 <= s < self.sizes[c]:
                    raise LetterOutOfRange(f"letter {s} out of range for color {c + 1}",
                                           color=c + 1, letter=s)
            out.append(w)
        return Path(tuple(out))

    def edge(self, color: int, letter: int) -> Path:
        """Edge ``x^color_letter`` with 1-based ``color``."""
        return self.path(*[(letter,) if c == color - 1 else () for c in range(self.k)])

    def edges(self) -> list:
        return [Path.edge(self.k, c, s) for c in range(self.k) for s in range(self.sizes[c])]


def validate_kgraph(k: int, sizes: Sequence[int], theta, cap: int = DEFAULT_CAP) -> KGraph:
    """Check theta bijectivity and (for k >= 3) the cubic condition."""
    sizes = tuple(int(n) for n in sizes)
    if len(sizes) != k or k < 1:
        raise RankBSError("sizes must have length k >= 1", k=k, sizes=sizes)
    if any(n < 1 for n in sizes):
        raise RankBSError("sizes must be >= 1", sizes=sizes)
    if isinstance(theta, str):
        theta = make_theta(theta, sizes)
    elif not isinstance(theta, ThetaFamily):
        theta = ThetaFamily.from_tables(sizes, theta)
    if theta.sizes != sizes:
        raise RankBSError("theta sizes disagree with declared sizes", sizes=sizes)
    for (i, j), tab in theta.tables:
        seen = {e for row in tab for e in row}
        if len(seen) != sizes[i] * sizes[j]:
            raise NonBijectiveTheta(f"theta_{i + 1}{j + 1} is not a bijection", i=i + 1, j=j + 1)
    graph = KGraph(theta, cap)
    for i, j, l in itertools.combinations(range(k), 3):
        for s, t, u in itertools.product(range(sizes[i]), range(sizes[j]), range(sizes[l])):
            a, b = cubic_rewrites(graph, (i, s), (j, t), (l, u))
            if a != b:
                raise CubicConditionViolated(
                    f"colors ({i + 1},{j + 1},{l + 1}) at letters ({s},{t},{u}) rewrite inconsistently",
                    i=i + 1, j=j + 1, l=l + 1, s=s, t=t, u=u,
                    rewrite_a=[(c + 1, x) for c, x in a], rewrite_b=[(c + 1, x) for c, x in b])
    return graph


def cubic_rewrites(graph: KGraph, x, y, z) -> tuple:
    """The two maximal swap sequences taking ``x y z`` to reversed color order."""
    w = [x, y, z]
    w[0], w[1] = graph.swap(w[0], w[1])
    w[1], w[2] = graph.swap(w[1], w[2])
    w[0], w[1] = graph.swap(w[0], w[1])
    v = [x, y, z]
    v[1], v[2] = graph.swap(v[1], v[2])
    v[0], v[1] = graph.swap(v[0], v[1])
    v[1], v[2] = graph.swap(v[1], v[2])
    return tuple(w), tuple(v)


# ---------------------------------------------------------------------------
# operations

def normalize_word(graph: KGraph, colored_word: Iterable) -> Path:
    """Normal form of a word given as ``(color, letter)`` pairs, colors 1-based."""
    letters = []
    for c, s in colored_word:
        c = int(c) - 1
        if not 0 <= c < graph.k:
            raise LetterOutOfRange(f"color {c + 1} out of range", color=c + 1, letter=s)
        if not 0 <= s < graph.sizes[c]:
            raise LetterOutOfRange(f"letter {s} out of range for color {c + 1}",
                                   color=c + 1, letter=s)
        letters.append((c, s))
    return _split_sorted(graph.k, graph.sort_letters(letters))


def compose(graph: KGraph, p: Path, q: Path) -> Path:
    if q.is_empty():
        return p
    if p.is_empty():
        return q
    key = (p, q)
    hit = graph._compose_cache.get(key)
    if hit is None:
        hit = _split_sorted(graph.k, graph.sort_letters(p.letters() + q.letters()))
        if len(graph._compose_cache) < 500_000:
            graph._compose_cache[key] = hit
    return hit


def compose_all(graph: KGraph, *paths: Path) -> Path:
    out = Path.empty(graph.k)
    for p in paths:
        out = compose(graph, out, p)
    return out


def factorize(graph: KGraph, p: Path, n: Degree) -> tuple:
    """Unique ``(prefix, suffix)`` with ``d(prefix) == n`` and ``prefix suffix == p``."""
    d = p.degree
    n = tuple(n)
    if not dle(n, d):
        raise DegreeTooLarge(f"degree {n} exceeds path degree {d}", degree=n, path_degree=d)
    k = graph.k
    target = [c for c in range(k) for _ in range(n[c])]
    target += [c for c in range(k) for _ in range(d[c] - n[c])]
    letters = p.letters()
    for pos, want in enumerate(target):
        j = pos
        while letters[j][0] != want:
            j += 1
        while j > pos:
            letters[j - 1], letters[j] = graph.swap(letters[j - 1], letters[j])
            j -= 1
    cut = sum(n)
    return _split_sorted(k, letters[:cut]), _split_sorted(k, letters[cut:])


def enumerate_paths(graph: KGraph, n: Degree) -> list:
    """All paths of degree ``n`` in lexicographic word order."""
    n = tuple(n)
    hit = graph._enum_cache.get(n)
    if hit is not None:
        return hit
    total = graph.count_paths(n)
    if total > graph.cap:
        raise SizeOverflow(f"{total} paths of degree {n} exceed cap {graph.cap}",
                           count=total, cap=graph.cap)
    per_color = [list(itertools.product(range(size), repeat=e)) for size, e in zip(graph.sizes, n)]
    out = tuple(Path(tuple(ws)) for ws in itertools.product(*per_color))
    if total <= 100_000:
        graph._enum_cache[n] = out
    return out


def is_prefix(graph: KGraph, mu: Path, tau: Path):
    """Return the remainder ``r`` with ``mu r == tau``, or ``None``."""
    if not dle(mu.degree, tau.degree):
        return None
    head, tail = factorize(graph, tau, mu.degree)
    return tail if head == mu else None


def minimal_common_extensions(graph: KGraph, nu: Path, alpha: Path) -> list:
    """All ``(gamma, delta)`` with ``nu gamma == alpha delta`` of degree ``d(nu) v d(alpha)``."""
    key = (nu, alpha)
    hit = graph._mce_cache.get(key)
    if hit is not None:
        return hit
    if nu == alpha:
        out = [(Path.empty(graph.k), Path.empty(graph.k))]
    else:
        top = join(nu.degree, alpha.degree)
        out = []
        if top == nu.degree:
            rest = is_prefix(graph, alpha, nu)
            if rest is not None:
                out.append((Path.empty(graph.k), rest))
        elif top == alpha.degree:
            rest = is_prefix(graph, nu, alpha)
            if rest is not None:
                out.append((rest, Path.empty(graph.k)))
        else:
            for gamma in enumerate_paths(graph, dsub(top, nu.degree)):
                delta = is_prefix(graph, alpha, compose(graph, nu, gamma))
                if delta is not None:
                    out.append((gamma, delta))
    if len(graph._mce_cache) < 500_000:
        graph._mce_cache[key] = out
    return out
