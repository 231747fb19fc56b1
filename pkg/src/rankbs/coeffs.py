"""Exact coefficients in Q(i, sqrt(p_1), ..., sqrt(p_r)).

A coefficient is a finite sum ``sum_r (x_r + y_r i) sqrt(r)`` over squarefree
positive integers ``r``; the square roots of distinct squarefree integers are
linearly independent over Q(i), so the representation is canonical once zero
terms are dropped.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from sympy import factorint


@lru_cache(maxsize=4096)
def split_square(n: int) -> tuple:
    """``n = a^2 * r`` with ``r`` squarefree; returns ``(a, r)`` for ``n >= 1``."""
    a, r = 1, 1
    for p, e in factorint(n).items():
        a *= p ** (e // 2)
        if e % 2:
            r *= p
    return a, r


class Coefficient:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        # terms: dict r -> (re, im) with Fractions; zero entries removed
        self.terms = {}
        if terms:
            for r, (x, y) in terms.items():
                if x or y:
                    self.terms[r] = (x if type(x) is Fraction else Fraction(x),
                                     y if type(y) is Fraction else Fraction(y))
        self._hash = None

    # -- constructors ---------------------------------------------------------
    @classmethod
    def rational(cls, x) -> "Coefficient":
        x = Fraction(x)
        return cls({1: (x, Fraction(0))}) if x else ZERO

    @classmethod
    def gaussian(cls, x, y) -> "Coefficient":
        return cls({1: (Fraction(x), Fraction(y))})

    @classmethod
    def sqrt(cls, n) -> "Coefficient":
        """Principal square root of a nonnegative rational."""
        n = Fraction(n)
        if n < 0:
            return cls.sqrt(-n) * I
        if n == 0:
            return ZERO
        # sqrt(p/q) = sqrt(p q) / q
        a, r = split_square(n.numerator * n.denominator)
        return cls({r: (Fraction(a, n.denominator), Fraction(0))})

    @classmethod
    def coerce(cls, x) -> "Coefficient":
        if isinstance(x, Coefficient):
            return x
        if isinstance(x, complex):
            raise TypeError("floating complex numbers are not exact")
        if isinstance(x, float):
            raise TypeError("floats are not exact")
        return cls.rational(x)

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = Coefficient.coerce(other)
        out = dict(self.terms)
        for r, (x, y) in other.terms.items():
            if r in out:
                a, b = out[r]
                out[r] = (a + x, b + y)
            else:
                out[r] = (x, y)
        return Coefficient(out)

    __radd__ = __add__

    def __neg__(self):
        return Coefficient({r: (-x, -y) for r, (x, y) in self.terms.items()})

    def __sub__(self, other):
        return self + (-Coefficient.coerce(other))

    def __rsub__(self, other):
        return Coefficient.coerce(other) - self

    def __mul__(self, other):
        other = Coefficient.coerce(other)
        if self is ONE:
            return other
        if other is ONE:
            return self
        if len(self.terms) == 1 and len(other.terms) == 1 and 1 in self.terms and 1 in other.terms:
            (x, y), (u, v) = self.terms[1], other.terms[1]
            return Coefficient({1: (x * u - y * v, x * v + y * u)})
        out = {}
        for r, (x, y) in self.terms.items():
            for s, (u, v) in other.terms.items():
                g = math.gcd(r, s)
                t = (r // g) * (s // g)
                re, im = (x * u - y * v) * g, (x * v + y * u) * g
                if t in out:
                    a, b = out[t]
                    out[t] = (a + re, b + im)
                else:
                    out[t] = (re, im)
        return Coefficient(out)

    __rmul__ = __mul__

    def conjugate(self) -> "Coefficient":
        if all(not y for _, y in self.terms.values()):
            return self
        return Coefficient({r: (x, -y) for r, (x, y) in self.terms.items()})

    def inverse(self) -> "Coefficient":
        """Multiplicative inverse by repeated conjugation over each radical."""
        if not self.terms:
            raise ZeroDivisionError("inverse of zero coefficient")
        num = Coefficient(self.terms)
        den = num
        out = ONE
        # multiply by Galois conjugates until the denominator is a Gaussian rational
        primes = sorted({p for r in self.terms for p in factorint(r)})
        for p in primes:
            flip = Coefficient({r: ((x, y) if r % p else (-x, -y)) for r, (x, y) in den.terms.items()})
            out = out * flip
            den = den * flip
        (x, y) = den.terms.get(1, (Fraction(0), Fraction(0)))
        if set(den.terms) - {1}:
            raise ArithmeticError("radical elimination failed")
        norm = x * x + y * y
        return out * Coefficient({1: (x / norm, -y / norm)})

    def __truediv__(self, other):
        return self * Coefficient.coerce(other).inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        for _ in range(n):
            out = out * self
        return out

    # -- comparison -----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Coefficient):
            try:
                other = Coefficient.coerce(other)
            except TypeError:
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def is_rational(self) -> bool:
        return not self.terms or (set(self.terms) == {1} and self.terms[1][1] == 0)

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.terms[1][0] if self.terms else Fraction(0)

    def is_nonnegative_rational(self) -> bool:
        return self.is_rational() and self.as_fraction() >= 0

    # -- printing -------------------------------------------------------------
    def __repr__(self):
        return f"Coefficient({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for r in sorted(self.terms):
            x, y = self.terms[r]
            g = _gauss_str(x, y)
            if r == 1:
                parts.append(g)
            elif g == "1":
                parts.append(f"√{r}")
            elif g == "-1":
                parts.append(f"-√{r}")
            elif any(ch in g for ch in "/ i"):
                parts.append(f"({g})·√{r}")
            else:
                parts.append(f"{g}·√{r}")
        return " + ".join(parts)

    def to_json(self):
        return [[r, str(x), str(y)] for r, (x, y) in sorted(self.terms.items())]


def _gauss_str(x: Fraction, y: Fraction) -> str:
    if y == 0:
        return str(x)
    im = "i" if y == 1 else "-i" if y == -1 else f"{y}i"
    if x == 0:
        return im
    sign = "-" if y < 0 else "+"
    mag = "i" if abs(y) == 1 else f"{abs(y)}i"
    return f"{x} {sign} {mag}"


ZERO = Coefficient()
ONE = Coefficient({1: (Fraction(1), Fraction(0))})
I = Coefficient({1: (Fraction(0), Fraction(1))})


def half_power(sizes: Sequence[int], twice_exponents: Sequence[int]) -> Coefficient:
    """``prod n_i^{e_i / 2}`` for integer ``e_i`` (given doubled)."""
    return _half_power(tuple(sizes), tuple(twice_exponents))


@lru_cache(maxsize=4096)
def _half_power(sizes: tuple, twice_exponents: tuple) -> Coefficient:
    num, den = 1, 1
    rad_num, rad_den = 1, 1
    for n, e in zip(sizes, twice_exponents):
        q, odd = divmod(abs(e), 2)
        if e >= 0:
            num *= n ** q
            rad_num *= n ** odd
        else:
            den *= n ** q
            rad_den *= n ** odd
    # sqrt(rad_num / rad_den) * num / den
    return Coefficient.sqrt(Fraction(rad_num, rad_den)) * Fraction(num, den)
