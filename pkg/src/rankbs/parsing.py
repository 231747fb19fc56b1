"""Text front ends: paths, star-algebra expressions, presets and session configs.

Expression grammar (whitespace insensitive)::

    expr    := ['-'] term (('+' | '-') term)*
    term    := factor (('*' | '·')? factor)*
    factor  := '-' factor | primary ['^*']
    primary := 's[' path ']' | 'u[' 'a' ['^' int] ']' | '(' expr ')'
             | int ['/' int] | 'i' | '√' int | 'sqrt(' int ')'
    path    := edge* | '()'
    edge    := 'x' color '[' letter ']' | 'e[' letter ']'      (e only in rank 1)

so ``(1/6)·√2 * s[x1[0] x2[1]] * u[a^3] * s[x1[1]]^*`` parses.
"""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any

from .coeffs import I, Coefficient
from .errors import ParseError, RankBSError
from .kgraph import Path, normalize_word
from .selfsim import SelfSimilarKGraph
from . import staralg as sa

_EDGE = re.compile(r"\s*(?:x(\d+)\[(\d+)\]|e\[(\d+)\])\s*")


def parse_path(ss: SelfSimilarKGraph, text: str) -> Path:
    """Normal form of a path written as edges, e.g. ``"x2[1] x1[0]"``."""
    text = text.strip()
    if text in ("", "()", "∅"):
        return Path.empty(ss.k)
    letters = []
    pos = 0
    while pos < len(text):
        m = _EDGE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot parse path at {text[pos:]!r}", text=text, position=pos)
        if m.group(3) is not None:
            if ss.k != 1:
                raise ParseError("e[s] is only available in rank 1; use x<color>[s]", text=text)
            letters.append((1, int(m.group(3))))
        else:
            letters.append((int(m.group(1)), int(m.group(2))))
        pos = m.end()
    try:
        return normalize_word(ss.graph, letters)
    except RankBSError as exc:
        raise ParseError(str(exc), text=text, **exc.details) from exc


_TOKENS = re.compile(r"""
    (?P<ws>\s+)
  | (?P<s>s\[)
  | (?P<u>u\[)
  | (?P<star>\^\*)
  | (?P<sqrt>√|sqrt\()
  | (?P<num>\d+)
  | (?P<i>i)
  | (?P<op>[-+*·/()\]])
""", re.VERBOSE)


class _Parser:
    def __init__(self, ss: SelfSimilarKGraph, text: str):
        self.ss = ss
        self.text = text
        self.pos = 0

    def error(self, msg: str):
        raise ParseError(msg, text=self.text, position=self.pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str | None:
        self.skip()
        if self.pos >= len(self.text):
            return None
        m = _TOKENS.match(self.text, self.pos)
        if not m:
            self.error(f"unexpected character {self.text[self.pos]!r}")
        return m.lastgroup if m.lastgroup != "op" else m.group()

    def take(self) -> re.Match:
        self.skip()
        m = _TOKENS.match(self.text, self.pos)
        self.pos = m.end()
        return m

    def expect(self, lit: str):
        self.skip()
        if not self.text.startswith(lit, self.pos):
            self.error(f"expected {lit!r}")
        self.pos += len(lit)

    def bracket(self) -> str:
        """Raw text up to the matching ``]`` (brackets nest)."""
        depth, start = 1, self.pos
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            depth += ch == "["
            depth -= ch == "]"
            self.pos += 1
            if depth == 0:
                return self.text[start:self.pos - 1]
        self.error("unbalanced '['")

    def parse(self) -> sa.FormalCombination:
        out = self.expr()
        if self.peek() is not None:
            self.error("trailing input")
        return out

    def expr(self):
        neg = False
        if self.peek() == "-":
            self.take()
            neg = True
        out = self.term()
        if neg:
            out = -out
        while self.peek() in ("+", "-"):
            op = self.take().group()
            t = self.term()
            out = out + t if op == "+" else out - t
        return out

    def term(self):
        out = self.factor()
        while True:
            nxt = self.peek()
            if nxt in ("*", "·"):
                self.take()
                out = sa.product(self.ss, out, self.factor())
            elif nxt in ("s", "u", "(", "sqrt", "num", "i"):
                out = sa.product(self.ss, out, self.factor())
            else:
                return out

    def factor(self):
        if self.peek() == "-":
            self.take()
            return -self.factor()
        out = self.primary()
        while self.peek() == "star":
            self.take()
            out = sa.adjoint(out)
        return out

    def scalar(self, c) -> sa.FormalCombination:
        return sa.one(self.ss).scale(c)

    def primary(self):
        kind = self.peek()
        if kind is None:
            self.error("unexpected end of expression")
        if kind == "s":
            self.take()
            return sa.s(self.ss, parse_path(self.ss, self.bracket()))
        if kind == "u":
            self.take()
            body = self.bracket().replace(" ", "")
            m = re.fullmatch(r"a(?:\^\(?([+-]?\d+)\)?)?|1", body)
            if not m:
                self.error(f"cannot parse group element {body!r}")
            g = 0 if body == "1" else int(m.group(1) or 1)
            return sa.u(self.ss, g)
        if kind == "(":
            self.take()
            out = self.expr()
            self.expect(")")
            return out
        if kind == "num":
            num = int(self.take().group())
            if self.peek() == "/":
                self.take()
                if self.peek() != "num":
                    self.error("expected denominator")
                den = int(self.take().group())
                if den == 0:
                    self.error("zero denominator")
                return self.scalar(Fraction(num, den))
            return self.scalar(num)
        if kind == "i":
            self.take()
            return self.scalar(I)
        if kind == "sqrt":
            tok = self.take().group()
            if self.peek() != "num":
                self.error("expected integer under the square root")
            n = int(self.take().group())
            if tok != "√":
                self.expect(")")
            return self.scalar(Coefficient.sqrt(n))
        self.error(f"unexpected token {kind!r}")


def parse_expression(ss: SelfSimilarKGraph, text: str) -> sa.FormalCombination:
    return _Parser(ss, text).parse()


# ---------------------------------------------------------------------------
# presets

_PRESET = re.compile(r"\s*(\w+)\s*[:(]?\s*([-\d,\s]*)\)?\s*$")


def preset_doc(name: str) -> dict:
    """Action spec for short names: ``odometer:2,3``, ``bs:2,-3``, ``po:2,3``,
    ``lambda1:2,4``, ``gbs:2,3,3,5`` (pairs ``n_i, m_i``), ``flip:2``, ``square``."""
    m = _PRESET.match(name)
    if not m:
        raise ParseError(f"cannot parse preset {name!r}", text=name)
    kind = m.group(1).lower()
    nums = [int(x) for x in m.group(2).replace(" ", "").split(",") if x]
    if kind in ("odometer", "e", "bs") and len(nums) == 2:
        return {"kind": "odometer", "n": nums[0], "m": nums[1]}
    if kind in ("po", "product_odometers") and nums:
        return {"kind": "product_odometers", "sizes": nums}
    if kind in ("lambda1", "lambda_one", "l1") and nums:
        return {"kind": "lambda_one", "m": nums}
    if kind == "gbs" and nums and len(nums) % 2 == 0:
        orbits = []
        for n, mm in zip(nums[::2], nums[1::2]):
            orbits.append([n, [mm if s == n - 1 else 0 for s in range(n)]])
        return {"kind": "gbs", "orbits": orbits}
    if kind == "flip" and len(nums) <= 1:
        n = nums[0] if nums else 2
        return {"kind": "trivial_action", "graph": {"k": 2, "sizes": [n, n], "theta": "flip"}}
    if kind == "square" and not nums:
        tab = [[[t, (s + 1) % 2] for t in range(2)] for s in range(2)]
        return {"kind": "trivial_action", "graph": {"k": 2, "sizes": [2, 2], "theta": [tab]}}
    raise ParseError(f"unknown preset {name!r}", text=name)


# ---------------------------------------------------------------------------
# session configuration


@dataclass
class SessionConfig:
    action: dict = field(default_factory=lambda: {"kind": "odometer", "n": 2, "m": 3})
    cap: int = 10**6
    depth: int = 5
    bound: int = 6
    seed: int = 0
    format: str = "text"

    def __post_init__(self):
        if self.format not in ("text", "json"):
            raise ParseError(f"format must be text or json, got {self.format!r}")
        for name in ("cap", "depth", "bound", "seed"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ParseError(f"{name} must be a nonnegative integer", field=name, value=v)
        if not isinstance(self.action, dict) or "kind" not in self.action:
            raise ParseError("action must be an object with a 'kind' field")
        if self.seed >= 2**64:
            raise ParseError("seed must fit in u64", value=self.seed)

    def to_json(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, doc: Any) -> "SessionConfig":
        if not isinstance(doc, dict):
            raise ParseError("config must be a JSON object")
        unknown = set(doc) - {"action", "cap", "depth", "bound", "seed", "format"}
        if unknown:
            raise ParseError(f"unknown config keys {sorted(unknown)}", keys=sorted(unknown))
        return cls(**doc)

    @classmethod
    def loads(cls, text: str) -> "SessionConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"config is not valid JSON: {exc}") from exc
        return cls.from_json(doc)
