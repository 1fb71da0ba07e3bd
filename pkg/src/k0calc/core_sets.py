"""Simple sets: canonical conjunctions of ``x_i = f^k(x_j)`` and ``x_i = p``.

A non-empty simple set over ``n`` coordinates partitions the coordinates
into *free groups* and *pinned* coordinates.  A free group is a set of
coordinates tied together by f-powers; it carries levels normalized to
minimum 0, and the coordinate at level ``l`` equals ``f^l(t)`` for a free
value ``t``.  A pinned coordinate is equal to a fixed :class:`OrbitPoint`.
Coordinates are 0-based in the API and 1-based in the JSON encoding.

Constraints are solved with a union-find that tracks integer level
offsets along edges; a level mismatch or an anchor conflict yields
the empty set.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .syntax import Atom, Link, OrbitPoint, Pin, Trivial, power_text, point_text

Group = tuple[tuple[int, ...], tuple[int, ...]]


class _OffsetUnionFind:
    """Union-find over coordinates with ``level(child) = level(parent) + offset``."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.offset = [0] * n
        self.anchor: dict[int, OrbitPoint] = {}
        self.conflict = False

    def find(self, x: int) -> tuple[int, int]:
        path = []
        while self.parent[x] != x:
            path.append(x)
            x = self.parent[x]
        root = x
        # path compression, accumulating offsets from the root downwards
        acc = 0
        for node in reversed(path):
            acc += self.offset[node]
            self.offset[node] = acc
            self.parent[node] = root
        return root, (self.offset[path[0]] if path else 0)

    def link(self, lo: int, k: int, hi: int) -> None:
        """Impose ``x_hi = f^k(x_lo)``, i.e. ``level(hi) = level(lo) + k``."""
        r_lo, l_lo = self.find(lo)
        r_hi, l_hi = self.find(hi)
        if r_lo == r_hi:
            if l_hi - l_lo != k:
                self.conflict = True
            return
        # the root with the smaller coordinate survives
        if r_hi < r_lo:
            r_lo, r_hi, l_lo, l_hi, k = r_hi, r_lo, l_hi, l_lo, -k
        # level(r_hi) measured from r_lo
        delta = l_lo + k - l_hi
        self.parent[r_hi] = r_lo
        self.offset[r_hi] = delta
        moved = self.anchor.pop(r_hi, None)
        if moved is not None:
            self._anchor(r_lo, moved.shifted(-delta))

    def pin(self, x: int, p: OrbitPoint) -> None:
        root, level = self.find(x)
        self._anchor(root, p.shifted(-level))

    def _anchor(self, root: int, p: OrbitPoint) -> None:
        old = self.anchor.get(root)
        if old is None:
            self.anchor[root] = p
        elif old != p:
            self.conflict = True


@functools.total_ordering
@dataclass(frozen=True)
class SimpleSet:
    """Canonical simple subset of ``M^arity``; build with :func:`simple_set`."""

    arity: int
    groups: tuple[Group, ...] = ()
    pinned: tuple[tuple[int, OrbitPoint], ...] = ()
    empty: bool = False

    # -- structure -----------------------------------------------------

    @property
    def dimension(self) -> float | int:
        return float("-inf") if self.empty else len(self.groups)

    def pins(self) -> dict[int, OrbitPoint]:
        return dict(self.pinned)

    def locate(self, coord: int) -> tuple[int, int] | OrbitPoint:
        """``(group index, level)`` for a free coordinate, else its pinned point."""
        for gi, (coords, levels) in enumerate(self.groups):
            if coord in coords:
                return gi, levels[coords.index(coord)]
        for c, p in self.pinned:
            if c == coord:
                return p
        raise ValueError(f"coordinate {coord} not in an empty set")

    def determining(self) -> tuple[int, ...]:
        """One determining coordinate per free group: minimal level, least index."""
        if self.empty:
            raise ValueError("the empty set has no determining elements")
        return tuple(coords[levels.index(0)] for coords, levels in self.groups)

    def constraints(self) -> tuple[list[tuple[int, int, int]], list[tuple[int, OrbitPoint]]]:
        """Links ``(lo, k, hi)`` and pins that define this set."""
        links = []
        for coords, levels in self.groups:
            root = coords[levels.index(0)]
            links.extend((root, lv, c) for c, lv in zip(coords, levels) if c != root)
        return links, list(self.pinned)

    def points(self) -> set[OrbitPoint]:
        return {p for _, p in self.pinned}

    # -- algebra -------------------------------------------------------

    def __and__(self, other: "SimpleSet") -> "SimpleSet":
        return intersect(self, other)

    def __lt__(self, other):  # total order for deterministic sorting only
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        return (self.empty, self.arity, -len(self.groups), self.groups, self.pinned)

    def product(self, other: "SimpleSet") -> "SimpleSet":
        if self.empty or other.empty:
            return empty_set(self.arity + other.arity)
        a = self.arity
        links, pins = self.constraints()
        links2, pins2 = other.constraints()
        links += [(lo + a, k, hi + a) for lo, k, hi in links2]
        pins += [(c + a, p) for c, p in pins2]
        return simple_set(a + other.arity, links, pins)

    def reindex(self, mapping: Sequence[int], arity: int) -> "SimpleSet":
        """Move coordinate ``i`` to ``mapping[i]`` in an ambient space of ``arity``."""
        if self.empty:
            return empty_set(arity)
        links, pins = self.constraints()
        return simple_set(
            arity,
            [(mapping[lo], k, mapping[hi]) for lo, k, hi in links],
            [(mapping[c], p) for c, p in pins],
        )

    # -- standard model ------------------------------------------------

    def contains(self, values: Sequence[int], modulus: int) -> bool:
        """Membership of an integer tuple in the standard model ``f(x) = x + N``."""
        if self.empty:
            return False
        for c, p in self.pinned:
            if values[c] != standard_value(p, modulus):
                return False
        for coords, levels in self.groups:
            base = values[coords[levels.index(0)]]
            for c, lv in zip(coords, levels):
                if values[c] != base + lv * modulus:
                    return False
        return True

    # -- text / json ---------------------------------------------------

    def __str__(self) -> str:
        if self.empty:
            return "empty"
        parts = []
        for lo, k, hi in self.constraints()[0]:
            parts.append(f"x{hi + 1} = " + power_text(k, f"x{lo + 1}"))
        parts += [f"x{c + 1} = {point_text(p)}" for c, p in self.pinned]
        return "{" + ", ".join(parts) + "}" if parts else f"M^{self.arity}"

    def to_json(self) -> dict:
        if self.empty:
            return {"arity": self.arity, "empty": True}
        return {
            "arity": self.arity,
            "groups": [{"coords": [c + 1 for c in cs], "levels": list(ls)} for cs, ls in self.groups],
            "pinned": [{"coord": c + 1, "orbit": p.orbit, "offset": p.offset} for c, p in self.pinned],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SimpleSet":
        n = data["arity"]
        if data.get("empty"):
            return empty_set(n)
        links, pins = [], []
        for g in data.get("groups", []):
            coords = [c - 1 for c in g["coords"]]
            levels = g["levels"]
            root = coords[levels.index(min(levels))]
            base = min(levels)
            links += [(root, lv - base, c) for c, lv in zip(coords, levels) if c != root]
        for p in data.get("pinned", []):
            pins.append((p["coord"] - 1, OrbitPoint(p["orbit"], p["offset"])))
        return simple_set(n, links, pins)


def standard_value(p: OrbitPoint, modulus: int) -> int:
    """The integer denoted by ``p`` in the standard model ``c_i = i - 1``."""
    if not p.is_constant:
        raise ValueError(f"generic point {point_text(p)} has no standard-model value")
    i = p.constant_index
    if not 1 <= i <= modulus or p.offset < 0:
        raise ValueError(f"{point_text(p)} is not a point for N={modulus}")
    return (i - 1) + p.offset * modulus


def standard_point(value: int, modulus: int) -> OrbitPoint:
    q, r = divmod(value, modulus)
    return OrbitPoint(f"c{r + 1}", q)


def empty_set(n: int) -> SimpleSet:
    return SimpleSet(n, empty=True)


def full_space(n: int) -> SimpleSet:
    return SimpleSet(n, tuple(((i,), (0,)) for i in range(n)))


def singleton(points: Sequence[OrbitPoint]) -> SimpleSet:
    return simple_set(len(points), [], list(enumerate(points)))


def simple_set(
    n: int,
    links: Iterable[tuple[int, int, int]] = (),
    pins: Iterable[tuple[int, OrbitPoint]] = (),
) -> SimpleSet:
    """Canonical set defined by links ``x_hi = f^k(x_lo)`` (any integer ``k``) and pins."""
    uf = _OffsetUnionFind(n)
    for lo, k, hi in links:
        uf.link(lo, k, hi)
        if uf.conflict:
            return empty_set(n)
    for c, p in pins:
        uf.pin(c, p)
        if uf.conflict:
            return empty_set(n)
    members: dict[int, list[tuple[int, int]]] = {}
    for c in range(n):
        root, level = uf.find(c)
        members.setdefault(root, []).append((c, level))
    groups, pinned = [], []
    for root, cs in members.items():
        anchor = uf.anchor.get(root)
        if anchor is None:
            base = min(lv for _, lv in cs)
            groups.append((tuple(c for c, _ in cs), tuple(lv - base for _, lv in cs)))
        else:
            for c, lv in cs:
                p = anchor.shifted(lv)
                if not p.valid:
                    return empty_set(n)
                pinned.append((c, p))
    groups.sort(key=lambda g: g[0][0])
    pinned.sort()
    return SimpleSet(n, tuple(groups), tuple(pinned))


def from_positive_atoms(atoms: Iterable[Atom], variables: Sequence[str]) -> SimpleSet:
    """The simple set of a conjunction of positive normalized atoms over ``variables``."""
    index = {v: i for i, v in enumerate(variables)}
    links, pins = [], []
    for a in atoms:
        if isinstance(a, Trivial):
            if not a.value:
                return empty_set(len(variables))
        elif isinstance(a, Link):
            links.append((index[a.lo], a.shift, index[a.hi]))
        elif isinstance(a, Pin):
            pins.append((index[a.var], a.point))
        else:
            raise TypeError(f"not an atom: {a!r}")
    return simple_set(len(variables), links, pins)


def atoms_of(s: SimpleSet, variables: Sequence[str]) -> list[Atom]:
    """Canonical positive atoms over ``variables`` defining ``s``."""
    if s.empty:
        return [Trivial(False)]
    links, pins = s.constraints()
    out: list[Atom] = []
    for lo, k, hi in links:
        a, b = variables[lo], variables[hi]
        out.append(Link(a, k, b) if k > 0 else Link(min(a, b), 0, max(a, b)))
    out += [Pin(variables[c], p) for c, p in pins]
    return out


def _check_arity(a: SimpleSet, b: SimpleSet) -> None:
    if a.arity != b.arity:
        raise ValueError(f"arity mismatch: {a.arity} vs {b.arity}")


@functools.lru_cache(maxsize=1 << 16)
def intersect(a: SimpleSet, b: SimpleSet) -> SimpleSet:
    _check_arity(a, b)
    if a.empty:
        return a
    if b.empty:
        return b
    la, pa = a.constraints()
    lb, pb = b.constraints()
    return simple_set(a.arity, la + lb, pa + pb)


def includes(a: SimpleSet, b: SimpleSet) -> bool:
    """Whether ``b`` is a subset of ``a``."""
    _check_arity(a, b)
    if b.empty:
        return True
    if a.empty:
        return False
    return intersect(a, b) == b


def dimension(a: SimpleSet) -> float | int:
    return a.dimension


def determining_assignment(a: SimpleSet) -> dict[tuple[int, ...], int]:
    """Map each free group (as its coordinate tuple) to a determining coordinate."""
    return dict(zip((coords for coords, _ in a.groups), a.determining()))


def irredundant(sets: Iterable[SimpleSet]) -> list[SimpleSet]:
    """Drop empty sets and sets included in another; keep the first of duplicates."""
    uniq: list[SimpleSet] = []
    for s in sets:
        if not s.empty and s not in uniq:
            uniq.append(s)
    keep = []
    for i, s in enumerate(uniq):
        if not any(j != i and includes(t, s) for j, t in enumerate(uniq)):
            keep.append(s)
    return sorted(keep)


def closure(cells) -> list[SimpleSet]:
    """Irreducible components of the closure of a union of cells."""
    return irredundant(c.positive for c in cells)


@functools.total_ordering
@dataclass(frozen=True)
class MeasurePoly:
    """An element of N[X], ordered as a multiset of exponents.

    ``a < b`` compares coefficients from the highest degree down, so
    replacing one ``X^d`` by any number of lower powers is a decrease.
    """

    coeffs: tuple[int, ...] = ()

    @classmethod
    def of(cls, exponents: Iterable[int]) -> "MeasurePoly":
        exps = list(exponents)
        c = [0] * (max(exps) + 1 if exps else 0)
        for e in exps:
            c[e] += 1
        return cls(tuple(c))

    def _key(self):
        c = list(self.coeffs)
        while c and c[-1] == 0:
            c.pop()
        return (len(c), tuple(reversed(c)))

    def __eq__(self, other):
        return isinstance(other, MeasurePoly) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __lt__(self, other: "MeasurePoly") -> bool:
        return self._key() < other._key()

    def __str__(self) -> str:
        terms = []
        for d in range(len(self.coeffs) - 1, -1, -1):
            a = self.coeffs[d]
            if a:
                mono = "1" if d == 0 else ("X" if d == 1 else f"X^{d}")
                if d == 0:
                    terms.append(str(a))
                else:
                    terms.append(mono if a == 1 else f"{a}*{mono}")
        return " + ".join(terms) or "0"


def s_measure(components: Sequence[SimpleSet]) -> MeasurePoly:
    """Sum of ``X^dim`` over an irredundant list of irreducible components."""
    comps = list(components)
    for i, a in enumerate(comps):
        if a.empty:
            raise ValueError("components must be non-empty")
        for j, b in enumerate(comps):
            if i != j and includes(a, b):
                raise ValueError(f"component {b} is included in {a}")
    return MeasurePoly.of(int(c.dimension) for c in comps)
