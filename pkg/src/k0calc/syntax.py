"""Terms, formulas, parsing and printing for the language {f, c1..cN}.

Formulas are immutable trees.  Terms are stored flattened as an f-power
applied to a base (a variable, a named constant or a generic parameter),
so ``f(f(x))`` and ``f^2(x)`` are the same value.

Constants and generic parameters fold into :class:`OrbitPoint` values:
``f^k(c_i)`` is the point at level ``k`` of the orbit of ``c_i`` and
``g:a@m`` is the point at level ``m`` of a declared generic orbit.  Named
constant orbits start at level 0 (``c_i`` has no preimage under ``f``);
generic orbits extend in both directions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Union


class ParseError(ValueError):
    """Raised on malformed formula text."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


# ---------------------------------------------------------------------------
# orbit points and terms


@dataclass(frozen=True, order=True)
class OrbitPoint:
    """A point ``f^offset`` of an orbit base, e.g. ``OrbitPoint("c1", 2)``.

    ``orbit`` is ``"c<i>"`` for the orbit of a named constant or
    ``"g:<name>"`` for a generic orbit.
    """

    orbit: str
    offset: int = 0

    @property
    def is_constant(self) -> bool:
        return not self.orbit.startswith("g:")

    @property
    def constant_index(self) -> int:
        if not self.is_constant:
            raise ValueError(f"{self} is not on a named-constant orbit")
        return int(self.orbit[1:])

    @property
    def valid(self) -> bool:
        return not self.is_constant or self.offset >= 0

    def shifted(self, k: int) -> "OrbitPoint":
        return OrbitPoint(self.orbit, self.offset + k)

    def __str__(self) -> str:
        return point_text(self)


def constant(i: int, offset: int = 0) -> OrbitPoint:
    return OrbitPoint(f"c{i}", offset)


def generic(name: str, offset: int = 0) -> OrbitPoint:
    return OrbitPoint(f"g:{name}", offset)


def point_text(p: OrbitPoint) -> str:
    if p.is_constant:
        return power_text(p.offset, p.orbit)
    return p.orbit if p.offset == 0 else f"{p.orbit}@{p.offset}"


def power_text(k: int, inner: str) -> str:
    if k == 0:
        return inner
    if k == 1:
        return f"f({inner})"
    return f"f^{k}({inner})"


@dataclass(frozen=True, order=True)
class Var:
    name: str


@dataclass(frozen=True, order=True)
class Const:
    index: int


@dataclass(frozen=True, order=True)
class Param:
    name: str
    offset: int = 0


Base = Union[Var, Const, Param]


@dataclass(frozen=True)
class Term:
    """``f^shift(base)`` with ``shift >= 0``."""

    shift: int
    base: Base

    def __post_init__(self):
        if self.shift < 0:
            raise ValueError("term shifts are natural numbers")

    @property
    def is_ground(self) -> bool:
        return not isinstance(self.base, Var)

    def point(self) -> OrbitPoint:
        b = self.base
        if isinstance(b, Const):
            return OrbitPoint(f"c{b.index}", self.shift)
        if isinstance(b, Param):
            return OrbitPoint(f"g:{b.name}", b.offset + self.shift)
        raise ValueError("variable term has no orbit point")

    def apply(self, k: int) -> "Term":
        return Term(self.shift + k, self.base)

    def __str__(self) -> str:
        b = self.base
        if isinstance(b, Var):
            inner = b.name
        elif isinstance(b, Const):
            inner = f"c{b.index}"
        else:
            inner = f"g:{b.name}" if b.offset == 0 else f"g:{b.name}@{b.offset}"
        return power_text(self.shift, inner)


def var(name: str, shift: int = 0) -> Term:
    return Term(shift, Var(name))


def ground(p: OrbitPoint) -> Term:
    """The canonical term denoting ``p``."""
    if p.is_constant:
        if p.offset < 0:
            raise ValueError(f"{p.orbit} has no preimage")
        return Term(p.offset, Const(p.constant_index))
    return Term(0, Param(p.orbit[2:], p.offset))


# ---------------------------------------------------------------------------
# normalized atoms


@dataclass(frozen=True, order=True)
class Trivial:
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


@dataclass(frozen=True, order=True)
class Link:
    """``hi = f^shift(lo)``; ``shift >= 0``, and ``lo < hi`` when ``shift == 0``."""

    lo: str
    shift: int
    hi: str

    def __str__(self) -> str:
        return f"{power_text(self.shift, self.lo)} = {self.hi}"


@dataclass(frozen=True, order=True)
class Pin:
    """``var = point``."""

    var: str
    point: OrbitPoint

    def __str__(self) -> str:
        return f"{self.var} = {point_text(self.point)}"


Atom = Union[Trivial, Link, Pin]


def normalize_atom(lhs: Term, rhs: Term) -> Atom:
    """Rewrite ``lhs = rhs`` into a canonical oriented atom.

    Common f-powers cancel because f is injective; an atom between two
    occurrences of the same variable holds only with equal shifts since f
    has no cycles; ``f^k(x) = p`` becomes ``x = f^-k(p)``, which is false
    when ``p`` sits on a named-constant orbit below level ``k``.
    """
    if lhs.is_ground and rhs.is_ground:
        return Trivial(lhs.point() == rhs.point())
    if lhs.is_ground:
        lhs, rhs = rhs, lhs
    x = lhs.base.name
    if rhs.is_ground:
        p = rhs.point().shifted(-lhs.shift)
        return Pin(x, p) if p.valid else Trivial(False)
    y = rhs.base.name
    if x == y:
        return Trivial(lhs.shift == rhs.shift)
    k = lhs.shift - rhs.shift
    if k > 0:
        return Link(x, k, y)
    if k < 0:
        return Link(y, -k, x)
    return Link(min(x, y), 0, max(x, y))


def atom_terms(atom: Atom) -> tuple[Term, Term]:
    """A term pair whose normalization is ``atom``."""
    if isinstance(atom, Link):
        return Term(atom.shift, Var(atom.lo)), var(atom.hi)
    if isinstance(atom, Pin):
        return var(atom.var), ground(atom.point)
    raise ValueError("trivial atoms have no term form")


def atom_variables(atom: Atom) -> tuple[str, ...]:
    if isinstance(atom, Link):
        return (atom.lo, atom.hi)
    if isinstance(atom, Pin):
        return (atom.var,)
    return ()


# ---------------------------------------------------------------------------
# formulas


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Bool(Formula):
    value: bool


@dataclass(frozen=True)
class Eq(Formula):
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    parts: tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    parts: tuple[Formula, ...]


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


TRUE = Bool(True)
FALSE = Bool(False)


def conj(parts: Iterable[Formula]) -> Formula:
    parts = tuple(parts)
    if not parts:
        return TRUE
    return parts[0] if len(parts) == 1 else And(parts)


def disj(parts: Iterable[Formula]) -> Formula:
    parts = tuple(parts)
    if not parts:
        return FALSE
    return parts[0] if len(parts) == 1 else Or(parts)


def atom_formula(atom: Atom) -> Formula:
    if isinstance(atom, Trivial):
        return Bool(atom.value)
    return Eq(*atom_terms(atom))


def subformulas(phi: Formula):
    yield phi
    if isinstance(phi, Not):
        yield from subformulas(phi.body)
    elif isinstance(phi, (And, Or)):
        for p in phi.parts:
            yield from subformulas(p)
    elif isinstance(phi, (Exists, Forall)):
        yield from subformulas(phi.body)


def terms_of(phi: Formula):
    for sub in subformulas(phi):
        if isinstance(sub, Eq):
            yield sub.lhs
            yield sub.rhs


def free_variables(phi: Formula) -> set[str]:
    if isinstance(phi, Eq):
        return {t.base.name for t in (phi.lhs, phi.rhs) if isinstance(t.base, Var)}
    if isinstance(phi, Not):
        return free_variables(phi.body)
    if isinstance(phi, (And, Or)):
        out: set[str] = set()
        for p in phi.parts:
            out |= free_variables(p)
        return out
    if isinstance(phi, (Exists, Forall)):
        return free_variables(phi.body) - {phi.var}
    return set()


def quantifier_depth(phi: Formula) -> int:
    if isinstance(phi, Not):
        return quantifier_depth(phi.body)
    if isinstance(phi, (And, Or)):
        return max((quantifier_depth(p) for p in phi.parts), default=0)
    if isinstance(phi, (Exists, Forall)):
        return 1 + quantifier_depth(phi.body)
    return 0


def has_generic_parameters(phi: Formula) -> bool:
    return any(isinstance(t.base, Param) for t in terms_of(phi))


def max_constant_index(phi: Formula) -> int:
    return max((t.base.index for t in terms_of(phi) if isinstance(t.base, Const)), default=0)


# ---------------------------------------------------------------------------
# printing

_OR, _AND, _UNARY = 1, 2, 3


def print_formula(phi: Formula) -> str:
    """Canonical text; ``parse(print_formula(phi))`` rebuilds ``phi``."""
    return _print(phi)


def _is_open(phi: Formula) -> bool:
    # a quantifier scope runs to the right end, so it must be bracketed
    # when anything can follow it
    if isinstance(phi, (Exists, Forall)):
        return True
    if isinstance(phi, Not) and not isinstance(phi.body, Eq):
        return _is_open(phi.body)
    return False


def _prec(phi: Formula) -> int:
    if isinstance(phi, Or):
        return _OR
    if isinstance(phi, And):
        return _AND
    return _UNARY


def _operand(phi: Formula, level: int) -> str:
    text = _print(phi)
    if _prec(phi) <= level or _is_open(phi):
        return f"({text})"
    return text


def _print(phi: Formula) -> str:
    if isinstance(phi, Bool):
        return "true" if phi.value else "false"
    if isinstance(phi, Eq):
        return f"{phi.lhs} = {phi.rhs}"
    if isinstance(phi, Not):
        if isinstance(phi.body, Eq):
            return f"{phi.body.lhs} != {phi.body.rhs}"
        body = phi.body
        text = _print(body)
        if isinstance(body, (And, Or)) or (isinstance(body, Not) and isinstance(body.body, Eq)):
            text = f"({text})"
        return "~" + text
    if isinstance(phi, And):
        return " & ".join(_operand(p, _AND) for p in phi.parts)
    if isinstance(phi, Or):
        return " | ".join(_operand(p, _OR) for p in phi.parts)
    if isinstance(phi, Exists):
        return f"E {phi.var}. {_print(phi.body)}"
    if isinstance(phi, Forall):
        return f"A {phi.var}. {_print(phi.body)}"
    raise TypeError(f"not a formula: {phi!r}")


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<param>g:[A-Za-z_\#][A-Za-z0-9_\#]*)
  | (?P<int>-?\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>!=|[=~&|().^@])
    """,
    re.VERBOSE,
)

_KEYWORDS = {"true", "false", "E", "A", "f"}
_CONST = re.compile(r"c(\d+)$")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, interface: Iterable[str], modulus: int):
        self.toks = _tokenize(text)
        self.i = 0
        self.interface = tuple(interface)
        self.modulus = modulus
        self.bound: list[str] = []

    def peek(self, ahead: int = 0):
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.next()
        if text != value or kind not in ("op", "ident"):
            raise ParseError(f"expected {value!r}, found {text or 'end of input'!r}", pos)

    def at(self, value: str) -> bool:
        kind, text, _ = self.peek()
        return text == value and kind in ("op", "ident")

    def parse(self) -> Formula:
        phi = self.formula()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {text!r}", pos)
        return phi

    def formula(self) -> Formula:
        parts = [self.conjunction()]
        while self.at("|"):
            self.next()
            parts.append(self.conjunction())
        return disj(parts)

    def conjunction(self) -> Formula:
        parts = [self.unary()]
        while self.at("&"):
            self.next()
            parts.append(self.unary())
        return conj(parts)

    def unary(self) -> Formula:
        if self.at("~"):
            self.next()
            return Not(self.unary())
        if self.at("E") or self.at("A"):
            return self.quantifier()
        return self.primary()

    def quantifier(self) -> Formula:
        _, q, _ = self.next()
        kind, name, pos = self.next()
        if kind != "ident" or name in _KEYWORDS or _CONST.match(name):
            raise ParseError(f"bad bound variable {name!r}", pos)
        if name in self.interface or name in self.bound:
            raise ParseError(f"variable {name!r} is already bound", pos)
        self.expect(".")
        self.bound.append(name)
        body = self.formula()
        self.bound.pop()
        return Exists(name, body) if q == "E" else Forall(name, body)

    def primary(self) -> Formula:
        if self.at("true"):
            self.next()
            return TRUE
        if self.at("false"):
            self.next()
            return FALSE
        if self.at("("):
            self.next()
            phi = self.formula()
            self.expect(")")
            return phi
        lhs = self.term()
        kind, op, pos = self.next()
        if op not in ("=", "!="):
            raise ParseError(f"expected '=' or '!=', found {op or 'end of input'!r}", pos)
        rhs = self.term()
        atom = Eq(lhs, rhs)
        return atom if op == "=" else Not(atom)

    def term(self) -> Term:
        kind, text, pos = self.next()
        if kind == "ident" and text == "f":
            k = 1
            if self.at("^"):
                self.next()
                kk, num, npos = self.next()
                if kk != "int" or int(num) < 0:
                    raise ParseError("expected a natural number after 'f^'", npos)
                k = int(num)
            self.expect("(")
            inner = self.term()
            self.expect(")")
            return inner.apply(k)
        if kind == "param":
            offset = 0
            if self.at("@"):
                self.next()
                kk, num, npos = self.next()
                if kk != "int":
                    raise ParseError("expected an integer offset after '@'", npos)
                offset = int(num)
            return Term(0, Param(text[2:], offset))
        if kind == "ident":
            m = _CONST.match(text)
            if m:
                i = int(m.group(1))
                if not 1 <= i <= self.modulus:
                    raise ParseError(f"constant index {i} out of range 1..{self.modulus}", pos)
                return Term(0, Const(i))
            if text in _KEYWORDS:
                raise ParseError(f"unexpected keyword {text!r}", pos)
            if text not in self.interface and text not in self.bound:
                raise ParseError(f"unbound variable {text!r}", pos)
            return var(text)
        raise ParseError(f"expected a term, found {text or 'end of input'!r}", pos)


def parse(text: str, interface: Iterable[str], modulus: int) -> Formula:
    """Parse formula text over the ordered free-variable ``interface``.

    >>> print(parse("f(f(x)) = c1", ["x"], 2))
    f^2(x) = c1
    """
    if modulus < 1:
        raise ValueError("modulus must be at least 1")
    interface = tuple(interface)
    for name in interface:
        if name in _KEYWORDS or _CONST.match(name) or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
            raise ValueError(f"bad interface variable {name!r}")
    return _Parser(text, interface, modulus).parse()
