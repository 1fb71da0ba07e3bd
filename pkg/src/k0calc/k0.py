"""Class polynomials in (Z/NZ)[X] and the Grothendieck class of a decomposition.

The class of a cell ``B \\ (B_1 u ... u B_r)`` is ``X^dim(B)`` minus the class
of the union of its negatives, expanded by inclusion-exclusion over
intersections of simple sets.  All of that happens in exact integers
(:class:`IntPoly`); reduction mod N happens once, in :class:`ClassPoly`.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core_sets import SimpleSet, intersect, irredundant


@dataclass(frozen=True)
class IntPoly:
    """Integer polynomial; ``coeffs[i]`` is the coefficient of ``X^i``."""

    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        c = list(self.coeffs)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(int(a) for a in c))

    @classmethod
    def monomial(cls, d: int, a: int = 1) -> "IntPoly":
        return cls((0,) * d + (a,))

    @property
    def degree(self) -> float | int:
        return len(self.coeffs) - 1 if self.coeffs else float("-inf")

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __add__(self, other: "IntPoly") -> "IntPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPoly(tuple(self.coeff(i) + other.coeff(i) for i in range(n)))

    def __neg__(self) -> "IntPoly":
        return IntPoly(tuple(-a for a in self.coeffs))

    def __sub__(self, other: "IntPoly") -> "IntPoly":
        return self + (-other)

    def __mul__(self, other) -> "IntPoly":
        if isinstance(other, int):
            return IntPoly(tuple(a * other for a in self.coeffs))
        out = [0] * max(0, len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return IntPoly(tuple(out))

    __rmul__ = __mul__

    def __call__(self, x: int) -> int:
        acc = 0
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def reduce(self, modulus: int) -> "ClassPoly":
        return ClassPoly(modulus, self.coeffs)

    def __str__(self) -> str:
        return poly_text(self.coeffs, "B")


def poly_text(coeffs: Sequence[int], x: str = "X") -> str:
    """Descending-degree text such as ``2*X^2 + X - 3``."""
    terms = []
    for d in range(len(coeffs) - 1, -1, -1):
        a = coeffs[d]
        if a == 0:
            continue
        mono = "" if d == 0 else (x if d == 1 else f"{x}^{d}")
        mag = abs(a)
        body = str(mag) if not mono else (mono if mag == 1 else f"{mag}*{mono}")
        if not terms:
            terms.append(body if a > 0 else f"-{body}")
        else:
            terms.append(("+ " if a > 0 else "- ") + body)
    return " ".join(terms) or "0"


@dataclass(frozen=True)
class ClassPoly:
    """Element of (Z/NZ)[X] with coefficients in ``[0, N)`` and no trailing zeros."""

    modulus: int
    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be at least 1")
        c = [int(a) % self.modulus for a in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def x_power(cls, modulus: int, d: int) -> "ClassPoly":
        return cls(modulus, (0,) * d + (1,))

    @property
    def degree(self) -> float | int:
        return len(self.coeffs) - 1 if self.coeffs else float("-inf")

    def _same(self, other: "ClassPoly") -> None:
        if self.modulus != other.modulus:
            raise ValueError(f"modulus mismatch: {self.modulus} vs {other.modulus}")

    def __add__(self, other: "ClassPoly") -> "ClassPoly":
        self._same(other)
        n = max(len(self.coeffs), len(other.coeffs))
        get = lambda c, i: c[i] if i < len(c) else 0  # noqa: E731
        return ClassPoly(self.modulus, tuple(get(self.coeffs, i) + get(other.coeffs, i) for i in range(n)))

    def __sub__(self, other: "ClassPoly") -> "ClassPoly":
        self._same(other)
        return self + ClassPoly(self.modulus, tuple(-a for a in other.coeffs))

    def __mul__(self, other: "ClassPoly") -> "ClassPoly":
        self._same(other)
        return (IntPoly(self.coeffs) * IntPoly(other.coeffs)).reduce(self.modulus)

    def __str__(self) -> str:
        return poly_text(self.coeffs)

    def to_json(self) -> dict:
        return {"modulus": self.modulus, "coeffs": list(self.coeffs)}

    @classmethod
    def from_json(cls, data: dict) -> "ClassPoly":
        return cls(data["modulus"], tuple(data["coeffs"]))


def classes_equal(a: ClassPoly, b: ClassPoly) -> bool:
    a._same(b)
    return a.coeffs == b.coeffs


# ---------------------------------------------------------------------------
# classes of definable sets


def simple_class(s: SimpleSet) -> IntPoly:
    return IntPoly() if s.empty else IntPoly.monomial(len(s.groups))


@functools.lru_cache(maxsize=1 << 14)
def _union_class(sets: tuple[SimpleSet, ...]) -> IntPoly:
    if not sets:
        return IntPoly()
    head, rest = sets[0], sets[1:]
    overlap = tuple(irredundant(intersect(head, s) for s in rest))
    return simple_class(head) + _union_class(rest) - _union_class(overlap)


def union_class(sets: Iterable[SimpleSet]) -> IntPoly:
    """Integer class of a finite union of simple sets, by recursive inclusion-exclusion.

    Sets included in another member are dropped first; they do not change
    the union.
    """
    return _union_class(tuple(irredundant(sets)))


def cell_int_class(cell) -> IntPoly:
    return simple_class(cell.positive) - union_class(cell.negatives)


def int_class_of(d) -> IntPoly:
    total = IntPoly()
    for cell in d.cells:
        total = total + cell_int_class(cell)
    return total


def class_of(d, modulus: int) -> ClassPoly:
    """Grothendieck class of a :class:`~k0calc.decompose.Decomposition`."""
    return int_class_of(d).reduce(modulus)


def class_of_basic(b, modulus: int) -> ClassPoly:
    """Associated polynomial of a basic set, reduced mod N."""
    return b.polynomial().reduce(modulus)


def dim_semiring_value(d) -> float | int:
    """Dimension of the closure: max over positives, ``-inf`` when empty."""
    return max((c.positive.dimension for c in d.cells), default=float("-inf"))


def dim_preorder(a, b) -> bool:
    """Whether ``a`` definably injects into ``F x b`` for a finite ``F``."""
    return dim_semiring_value(a) <= dim_semiring_value(b)


_TERM = re.compile(r"\s*([+-]?)\s*(\d+)?\s*(\*?\s*[XB](?:\s*\^\s*(\d+))?)?\s*")


def parse_poly(text: str) -> IntPoly:
    """Integer polynomial from text such as ``2*X^2 + X - 3`` (``B`` also accepted)."""
    s = text.strip()
    if not s:
        raise ValueError("empty polynomial")
    coeffs: dict[int, int] = {}
    pos = 0
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos or (not m.group(2) and not m.group(3)):
            raise ValueError(f"bad polynomial text at position {pos}: {text!r}")
        if not first and not m.group(1):
            raise ValueError(f"missing operator at position {pos}: {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        a = int(m.group(2)) if m.group(2) else 1
        if m.group(3):
            d = int(m.group(4)) if m.group(4) else 1
        else:
            d = 0
        coeffs[d] = coeffs.get(d, 0) + sign * a
        pos = m.end()
        first = False
    deg = max(coeffs)
    return IntPoly(tuple(coeffs.get(i, 0) for i in range(deg + 1)))
