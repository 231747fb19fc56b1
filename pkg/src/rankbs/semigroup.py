"""Canonical forms ``e_mu a^l`` in the semigroups S_N and S_Z of a self-similar k-graph.

Multiplication is ``(mu, k)(nu, l) = (mu (a^k . nu), a^k|_nu + l)``.

The set ``{j : (alpha, j) in S_N}`` is closed upward (multiply by ``a``), so
it is determined by its minimum :func:`min_exponent`.  Every element with a
nonempty path is ``a^t e w`` for some ``t >= 0``, edge ``e`` and ``w`` in S_N,
which gives the recursion used there.  With nonnegative restriction data the
minimum is always 0; with negative data it can be negative or unbounded.
"""

from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvalidLetter, NotRightLCM, ParseError, SizeOverflow
from .kgraph import Path, compose, factorize, is_prefix, minimal_common_extensions, unit
from .selfsim import SelfSimilarKGraph, act_restrict

ORBIT_CAP = 10**6


@dataclass(frozen=True, order=True)
class SemigroupElement:
    path: Path
    exp: int

    def to_json(self) -> dict:
        return {"path": self.path.to_json(), "exp": self.exp}


def identity(ss: SelfSimilarKGraph) -> SemigroupElement:
    return SemigroupElement(Path.empty(ss.k), 0)


def generator_a(ss: SelfSimilarKGraph, power: int = 1) -> SemigroupElement:
    return SemigroupElement(Path.empty(ss.k), power)


def generator_edge(ss: SelfSimilarKGraph, color: int, letter: int) -> SemigroupElement:
    """Edge generator, ``color`` 1-based."""
    return SemigroupElement(ss.graph.edge(color, letter), 0)


def generators(ss: SelfSimilarKGraph) -> list:
    """The S_N alphabet: ``a`` followed by every edge."""
    return [generator_a(ss)] + [SemigroupElement(e, 0) for e in ss.graph.edges()]


def multiply(ss: SelfSimilarKGraph, x: SemigroupElement, y: SemigroupElement) -> SemigroupElement:
    moved, h = act_restrict(ss, x.exp, y.path)
    return SemigroupElement(compose(ss.graph, x.path, moved), h + y.exp)


def multiply_all(ss: SelfSimilarKGraph, items: Iterable) -> SemigroupElement:
    out = identity(ss)
    for x in items:
        out = multiply(ss, out, x)
    return out


# ---------------------------------------------------------------------------
# generator words

_TOKEN = re.compile(r"\s*(?:(?P<a>a)(?:\^\(?(?P<pow>[+-]?\d+)\)?)?|e\[(?P<e>\d+)\]|x(?P<c>\d+)\[(?P<s>\d+)\]|(?P<one>1))\s*[·*]?")


def parse_generator_word(ss: SelfSimilarKGraph, text: str) -> list:
    """Tokens of a word such as ``"e[0] e[1] a^3"`` or ``"x1[0] x2[2] a^-1"``.

    Returns a list of ``("a", power)`` and ``("x", color, letter)`` tuples.
    """
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot parse generator word at {text[pos:]!r}", text=text, position=pos)
        pos = m.end()
        if m.group("a"):
            out.append(("a", int(m.group("pow")) if m.group("pow") else 1))
        elif m.group("e") is not None:
            if ss.k != 1:
                raise ParseError("e[s] is only available in rank 1; use x<color>[s]", text=text)
            out.append(("x", 1, int(m.group("e"))))
        elif m.group("c") is not None:
            out.append(("x", int(m.group("c")), int(m.group("s"))))
    return out


def normalize_generator_word(ss: SelfSimilarKGraph, w, mode: str = "N") -> SemigroupElement:
    """Fold a generator word through :func:`multiply`.

    ``w`` is a string or a token list.  Mode ``"N"`` admits only nonnegative
    powers of ``a``; mode ``"Z"`` admits all.
    """
    if mode not in ("N", "Z"):
        raise ValueError("mode must be 'N' or 'Z'")
    tokens = parse_generator_word(ss, w) if isinstance(w, str) else list(w)
    out = identity(ss)
    for tok in tokens:
        if tok[0] == "a":
            if mode == "N" and tok[1] < 0:
                raise InvalidLetter("a^-1 is not a letter of S_N", token=f"a^{tok[1]}")
            gen = generator_a(ss, tok[1])
        elif tok[0] == "x":
            _, c, s = tok
            if not (1 <= c <= ss.k and 0 <= s < ss.sizes[c - 1]):
                raise InvalidLetter(f"no edge x{c}[{s}]", color=c, letter=s)
            gen = generator_edge(ss, c, s)
        else:
            raise InvalidLetter(f"unknown token {tok!r}")
        out = multiply(ss, out, gen)
    return out


def element_str(ss: SelfSimilarKGraph, x: SemigroupElement) -> str:
    parts = []
    for c, w in enumerate(x.path.words):
        for s in w:
            parts.append(f"e[{s}]" if ss.k == 1 else f"x{c + 1}[{s}]")
    if x.exp:
        parts.append(f"a^{x.exp}")
    return " ".join(parts) if parts else "1"


def parse_element(ss: SelfSimilarKGraph, text: str, mode: str = "Z") -> SemigroupElement:
    return normalize_generator_word(ss, text, mode)


# ---------------------------------------------------------------------------
# membership in S_N

def orbit_period(ss: SelfSimilarKGraph, alpha: Path) -> int:
    """Smallest ``N > 0`` with ``a^N . alpha = alpha``."""
    period = 1
    letters = alpha.letters()
    for c, s in reversed(letters):
        orb, _ = ss._where[c][s]
        h = orb.total
        if h == 0:
            raise ValueError("orbit period needs a pseudo-free action")
        period = orb.length * (period // math.gcd(period, abs(h)))
    return period


def min_exponent(ss: SelfSimilarKGraph, alpha: Path):
    """``min {j : (alpha, j) in S_N}``, or ``None`` when unbounded below."""
    if ss.nonnegative:
        # every candidate value is a restriction of a positive power, and q = 0 gives 0
        return 0
    memo = ss.__dict__.setdefault("_minexp", {})
    return _min_exponent(ss, alpha, memo)


def _min_exponent(ss, alpha, memo):
    if alpha.is_empty():
        return 0
    if alpha in memo:
        return memo[alpha]
    N = orbit_period(ss, alpha)
    if N > ORBIT_CAP:
        raise SizeOverflow(f"orbit of {alpha} has length {N}", count=N, cap=ORBIT_CAP)
    # a^{-N} fixes alpha; stepping t -> t + N adds restrict(N, alpha) to -restrict(-t, alpha)
    drift = act_restrict(ss, N, alpha)[1]
    if drift < 0:
        memo[alpha] = None
        return None
    best = None
    d = alpha.degree
    for q in range(N):
        beta, h = act_restrict(ss, -q, alpha)
        for c in range(ss.k):
            if d[c] == 0:
                continue
            _, tail = factorize(ss.graph, beta, unit(ss.k, c))
            sub = _min_exponent(ss, tail, memo)
            if sub is None:
                memo[alpha] = None
                return None
            val = -h + sub
            if best is None or val < best:
                best = val
    memo[alpha] = best
    return best


def is_member(ss: SelfSimilarKGraph, x: SemigroupElement) -> bool:
    """Exact membership of a canonical form in S_N."""
    f = min_exponent(ss, x.path)
    return f is None or x.exp >= f


def left_quotient(ss: SelfSimilarKGraph, x: SemigroupElement, z: SemigroupElement, mode: str = "N"):
    """The unique ``s`` with ``x s = z`` (left cancellation), or ``None``.

    In mode ``"N"`` the quotient must also lie in S_N.
    """
    rest = is_prefix(ss.graph, x.path, z.path)
    if rest is None:
        return None
    sigma, h = act_restrict(ss, -x.exp, rest)
    h = -h  # restrict(x.exp, sigma) = -restrict(-x.exp, rest)
    s = SemigroupElement(sigma, z.exp - h)
    if mode == "N" and not is_member(ss, s):
        return None
    return s


def divides(ss: SelfSimilarKGraph, x: SemigroupElement, z: SemigroupElement) -> bool:
    """``z in x S_N``."""
    return left_quotient(ss, x, z) is not None


# ---------------------------------------------------------------------------
# right LCM

def right_lcm(ss: SelfSimilarKGraph, x: SemigroupElement, y: SemigroupElement):
    """Generator of ``x S_N  ∩  y S_N``, or ``None`` when the intersection is empty.

    For ``y.path = x.path nu~`` the candidate is ``(y.path, max(l, r + f))`` with
    ``alpha = a^{-k} . nu~``, ``r = a^k|_alpha`` and ``f = min_exponent(alpha)``
    (``f = 0`` for nonnegative data).  In rank >= 2 incomparable paths can have
    a unique minimal common extension, handled the same way from both sides.
    Raises :class:`NotRightLCM` when the intersection is not principal.
    """
    graph = ss.graph
    if x.path == y.path:
        return SemigroupElement(x.path, max(x.exp, y.exp))
    exts = minimal_common_extensions(graph, x.path, y.path)
    if not exts:
        return None
    if len(exts) > 1:
        raise NotRightLCM(f"{len(exts)} minimal common extensions; the intersection is not principal",
                          x=str(x.path), y=str(y.path), count=len(exts))
    gamma, delta = exts[0]
    bounds = []
    for el, ext in ((x, gamma), (y, delta)):
        if ext.is_empty():
            bounds.append(el.exp)
            continue
        alpha, r = act_restrict(ss, -el.exp, ext)
        r = -r
        f = min_exponent(ss, alpha)
        bounds.append(None if f is None else r + f)
    finite = [b for b in bounds if b is not None]
    if not finite:
        raise NotRightLCM("common multiples have unbounded-below exponents; no least one",
                          x=str(x.path), y=str(y.path))
    return SemigroupElement(compose(graph, x.path, gamma), max(finite))


def ideal_intersection(ss: SelfSimilarKGraph, x: SemigroupElement, y: SemigroupElement):
    """``z`` with ``x S_N ∩ y S_N = z S_N``; ``None`` for the empty intersection."""
    return right_lcm(ss, x, y)


# ---------------------------------------------------------------------------
# bounded search

def ball(ss: SelfSimilarKGraph, bound: int, alphabet: Sequence | None = None) -> dict:
    """Elements reachable by words of length ``<= bound``, mapped to their shortest length."""
    if alphabet is None:
        cache = ss.__dict__.setdefault("_balls", {})
        if bound not in cache:
            cache[bound] = _ball(ss, bound, generators(ss))
        return cache[bound]
    return _ball(ss, bound, alphabet)


def _ball(ss, bound, alphabet):
    seen = {identity(ss): 0}
    frontier = [identity(ss)]
    for step in range(1, bound + 1):
        nxt = []
        for x in frontier:
            for gen in alphabet:
                z = multiply(ss, x, gen)
                if z not in seen:
                    seen[z] = step
                    nxt.append(z)
        frontier = nxt
    return seen


@dataclass
class MembershipVerdict:
    status: str  # "yes" or "unknown"
    length: int | None = None

    def __bool__(self) -> bool:
        return self.status == "yes"


def membership_oracle(ss: SelfSimilarKGraph, candidate: SemigroupElement, length_bound: int) -> MembershipVerdict:
    """Breadth-first search over S_N words of length ``<= length_bound``."""
    alphabet = generators(ss)
    start = identity(ss)
    if candidate == start:
        return MembershipVerdict("yes", 0)
    seen = {start}
    frontier = deque([(start, 0)])
    while frontier:
        x, depth = frontier.popleft()
        if depth == length_bound:
            continue
        for gen in alphabet:
            z = multiply(ss, x, gen)
            if z == candidate:
                return MembershipVerdict("yes", depth + 1)
            if z not in seen:
                seen.add(z)
                frontier.append((z, depth + 1))
    return MembershipVerdict("unknown")


def bfs_right_lcm(ss: SelfSimilarKGraph, x: SemigroupElement, y: SemigroupElement, bound: int):
    """Least common right multiple among ``x s = y t`` with ``|s|, |t| <= bound``.

    Returns ``(status, element)`` with status ``"empty"``, ``"least"`` or
    ``"no_least"``.  ``z`` divides ``w`` when the (unique) left quotient lies in
    the same ball, so the answer is relative to the bound and never consults
    :func:`min_exponent`.
    """
    b = ball(ss, bound)
    left = {multiply(ss, x, s) for s in b}
    right = {multiply(ss, y, t) for t in b}
    common = left & right
    if not common:
        return "empty", None
    cands = sorted(common, key=lambda z: (len(z.path), z.exp, z))
    for z in cands:
        if all(w == z or left_quotient(ss, z, w, mode="Z") in b for w in common):
            return "least", z
    return "no_least", None
