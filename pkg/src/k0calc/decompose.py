"""Disjoint normal form ``⊔ (B_i \\ ∪_j B_ij)`` and basic sets.

A :class:`Cell` is a simple set minus finitely many simple subsets.  Its
emptiness is decided exactly: a simple set is irreducible, so it is covered
by proper simple subsets only if one of them is the whole set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .core_sets import (
    MeasurePoly,
    SimpleSet,
    closure,
    empty_set,
    from_positive_atoms,
    full_space,
    includes,
    intersect,
    irredundant,
    s_measure,
    simple_set,
)
from .k0 import IntPoly, int_class_of
from .syntax import OrbitPoint, generic


@dataclass(frozen=True)
class Cell:
    positive: SimpleSet
    negatives: tuple[SimpleSet, ...] = ()

    @property
    def arity(self) -> int:
        return self.positive.arity

    @property
    def dimension(self) -> int:
        return int(self.positive.dimension)

    def contains(self, values: Sequence[int], modulus: int) -> bool:
        return self.positive.contains(values, modulus) and not any(
            n.contains(values, modulus) for n in self.negatives
        )

    def __str__(self) -> str:
        if not self.negatives:
            return str(self.positive)
        return f"{self.positive} \\ (" + " u ".join(map(str, self.negatives)) + ")"

    def to_json(self) -> dict:
        return {"positive": self.positive.to_json(), "negatives": [n.to_json() for n in self.negatives]}

    @classmethod
    def from_json(cls, data: dict) -> "Cell":
        cell = make_cell(
            SimpleSet.from_json(data["positive"]), [SimpleSet.from_json(n) for n in data["negatives"]]
        )
        if cell is None:
            raise ValueError("cell is empty")
        return cell


def make_cell(positive: SimpleSet, negatives: Iterable[SimpleSet] = ()) -> Cell | None:
    """Canonical cell ``positive \\ ∪ negatives``, or ``None`` if it is empty."""
    if positive.empty:
        return None
    negs = irredundant(intersect(positive, n) for n in negatives)
    if any(n == positive for n in negs):
        return None
    return Cell(positive, tuple(negs))


def cell_intersect(a: Cell, b: Cell) -> Cell | None:
    return make_cell(intersect(a.positive, b.positive), a.negatives + b.negatives)


def cell_subtract(a: Cell, e: Cell) -> list[Cell]:
    """Pairwise disjoint cells whose union is ``a \\ e``.

    ``a \\ e = (a \\ B_e) ⊔ ⊔_j (a ∩ N_j \\ (N_1 u ... u N_{j-1}))`` where
    ``e = B_e \\ (N_1 u ... u N_m)``.
    """
    b = a.positive
    pieces = [make_cell(b, a.negatives + (intersect(b, e.positive),))]
    for j, nj in enumerate(e.negatives):
        bj = intersect(b, nj)
        pieces.append(make_cell(bj, a.negatives + e.negatives[:j]))
    return [p for p in pieces if p is not None]


def disjointness_certificate(a: Cell, b: Cell) -> dict | None:
    """Why ``a`` and ``b`` are disjoint, or ``None`` when they overlap."""
    both = intersect(a.positive, b.positive)
    if both.empty:
        return {"kind": "empty-intersection"}
    for side, cell in (("left", a), ("right", b)):
        for j, n in enumerate(cell.negatives):
            if includes(n, both):
                return {"kind": "negative-covers", "side": side, "negative": j}
    return None


# ---------------------------------------------------------------------------
# decompositions


@dataclass
class Decomposition:
    arity: int
    cells: list[Cell] = field(default_factory=list)
    traces: list[list[MeasurePoly]] = field(default_factory=list, compare=False, repr=False)
    s_traces: list[list[MeasurePoly]] = field(default_factory=list, compare=False, repr=False)

    def contains(self, values: Sequence[int], modulus: int) -> bool:
        return any(c.contains(values, modulus) for c in self.cells)

    @property
    def is_empty(self) -> bool:
        return not self.cells

    def certificates(self) -> list[tuple[int, int, dict | None]]:
        return [
            (i, j, disjointness_certificate(self.cells[i], self.cells[j]))
            for i, j in itertools.combinations(range(len(self.cells)), 2)
        ]

    def is_certified_disjoint(self) -> bool:
        return all(c is not None for _, _, c in self.certificates())

    def __str__(self) -> str:
        if not self.cells:
            return "empty"
        return " ⊔ ".join(f"[{c}]" for c in self.cells)

    def to_json(self) -> dict:
        return {"arity": self.arity, "cells": [c.to_json() for c in self.cells]}

    @classmethod
    def from_json(cls, data: dict) -> "Decomposition":
        return cls(data["arity"], [Cell.from_json(c) for c in data["cells"]])


def _pending_measure(items: Sequence[tuple[Cell, int]], base: int) -> MeasurePoly:
    # Exponents order first by dimension, then by how many earlier cells are
    # still to be checked; each rewrite trades one item for strictly smaller ones.
    return MeasurePoly.of(c.dimension * (base + 1) + (base - e) for c, e in items)


def _component_measure(done: Sequence[Cell], work: Sequence[tuple[Cell, int]]) -> MeasurePoly:
    return s_measure(closure(list(done) + [c for c, _ in work]))


def insert_disjoint(
    done: list[Cell], cells: Iterable[Cell], traces: list | None = None, s_traces: list | None = None
) -> None:
    """Add the part of each cell not yet covered by ``done``, keeping ``done`` disjoint.

    Each new cell is compared with the existing cells in index order; on
    the first overlap it is replaced by its difference with that cell.
    ``traces`` gets the pending-work measure per step, which is asserted to
    decrease; ``s_traces`` gets the s-measure of the components of all
    current cells per step, which is only recorded.
    """
    for cell in cells:
        base = len(done)
        work = [(cell, 0)]
        trace = [_pending_measure(work, base)]
        s_trace = [_component_measure(done, work)] if s_traces is not None else None
        while work:
            a, e = work.pop()
            hit = next(
                (i for i in range(e, base) if cell_intersect(a, done[i]) is not None), None
            )
            if hit is None:
                done.append(a)
            else:
                work.extend((p, hit + 1) for p in reversed(cell_subtract(a, done[hit])))
            m = _pending_measure(work, base)
            if not m < trace[-1]:
                raise AssertionError(f"measure did not decrease: {trace[-1]} -> {m}")
            trace.append(m)
            if s_trace is not None:
                s_trace.append(_component_measure(done, work))
        if traces is not None:
            traces.append(trace)
        if s_traces is not None:
            s_traces.append(s_trace)


def conjunct_cell(conjunct, variables: Sequence[str]) -> Cell | None:
    pos = [l.atom for l in conjunct if l.positive]
    b = from_positive_atoms(pos, variables)
    negs = [from_positive_atoms([l.atom], variables) for l in conjunct if not l.positive]
    return make_cell(b, negs)


def disjointify(qf, variables: Sequence[str], record_s_measure: bool = False) -> Decomposition:
    """Disjoint cell decomposition of the solution set of a DNF over ``variables``."""
    missing = qf.variables() - set(variables)
    if missing:
        raise ValueError(f"variables not in the interface: {sorted(missing)}")
    n = len(variables)
    raw = [conjunct_cell(c, variables) for c in qf.disjuncts]
    done: list[Cell] = []
    traces: list = []
    s_traces: list | None = [] if record_s_measure else None
    insert_disjoint(done, (c for c in raw if c is not None), traces, s_traces)
    return Decomposition(n, done, traces, s_traces or [])


def decompose_formula(phi, variables: Sequence[str], modulus: int) -> Decomposition:
    from .qe import eliminate

    return disjointify(eliminate(phi, modulus), variables)


def from_cells(arity: int, cells: Iterable[Cell]) -> Decomposition:
    """Decomposition of the union of arbitrary (possibly overlapping) cells."""
    done: list[Cell] = []
    traces: list = []
    insert_disjoint(done, cells, traces)
    return Decomposition(arity, done, traces)


def from_simple(s: SimpleSet) -> Decomposition:
    c = make_cell(s)
    return Decomposition(s.arity, [c] if c else [])


def union(a: Decomposition, b: Decomposition) -> Decomposition:
    _same_arity(a, b)
    return from_cells(a.arity, a.cells + b.cells)


def intersection(a: Decomposition, b: Decomposition) -> Decomposition:
    _same_arity(a, b)
    cells = [c for x in a.cells for y in b.cells if (c := cell_intersect(x, y)) is not None]
    return Decomposition(a.arity, cells)


def difference(a: Decomposition, b: Decomposition) -> Decomposition:
    _same_arity(a, b)
    cells = list(a.cells)
    for e in b.cells:
        cells = [p for c in cells for p in cell_subtract(c, e)]
    return Decomposition(a.arity, cells)


def complement(a: Decomposition) -> Decomposition:
    return difference(from_simple(full_space(a.arity)), a)


def product(a: Decomposition, b: Decomposition) -> Decomposition:
    """Cellwise product; products of disjoint cells stay disjoint."""
    cells = []
    for x in a.cells:
        for y in b.cells:
            pos = x.positive.product(y.positive)
            negs = [n.product(y.positive) for n in x.negatives]
            negs += [x.positive.product(n) for n in y.negatives]
            c = make_cell(pos, negs)
            if c is not None:
                cells.append(c)
    return Decomposition(a.arity + b.arity, cells)


def _same_arity(a: Decomposition, b: Decomposition) -> None:
    if a.arity != b.arity:
        raise ValueError(f"arity mismatch: {a.arity} vs {b.arity}")


def class_preimage_cells(d: Decomposition) -> list[tuple[Cell, list[tuple[int, SimpleSet]]]]:
    """Signed inclusion-exclusion terms ``(-1)^|K|, B ∩ ∩_{j∈K} B_j`` of each cell."""
    out = []
    for cell in d.cells:
        terms = []
        m = len(cell.negatives)
        for size in range(m + 1):
            for ks in itertools.combinations(range(m), size):
                s = cell.positive
                for k in ks:
                    s = intersect(s, cell.negatives[k])
                terms.append((-1 if size % 2 else 1, s))
        out.append((cell, terms))
    return out


# ---------------------------------------------------------------------------
# basic sets


@dataclass(frozen=True)
class Layer:
    k: int
    fiber: tuple[OrbitPoint, ...]
    tail: tuple[OrbitPoint, ...]


@dataclass(frozen=True)
class BasicSet:
    """``⊔_k F_k × M^k × S_k`` inside ``M^arity``.

    Fiber points are distinct across all layers, so the layers are disjoint
    through their first coordinate.
    """

    arity: int
    layers: tuple[Layer, ...] = ()

    def __post_init__(self):
        seen = set()
        for layer in self.layers:
            if not layer.fiber:
                raise ValueError("layers with empty fiber are omitted")
            if 1 + layer.k + len(layer.tail) != self.arity:
                raise ValueError(f"layer of dimension {layer.k} does not fit arity {self.arity}")
            for p in layer.fiber:
                if p in seen:
                    raise ValueError(f"fiber point {p} repeated")
                seen.add(p)

    def polynomial(self) -> IntPoly:
        total = IntPoly()
        for layer in self.layers:
            total = total + IntPoly.monomial(layer.k, len(layer.fiber))
        return total

    @property
    def dimension(self) -> float | int:
        return max((l.k for l in self.layers), default=float("-inf"))

    def simple_sets(self) -> list[SimpleSet]:
        out = []
        for layer in self.layers:
            tail = [(1 + layer.k + i, p) for i, p in enumerate(layer.tail)]
            for a in layer.fiber:
                out.append(simple_set(self.arity, [], [(0, a)] + tail))
        return out

    def to_decomposition(self) -> Decomposition:
        return Decomposition(self.arity, [Cell(s) for s in self.simple_sets()])

    def to_json(self) -> dict:
        pt = lambda p: {"orbit": p.orbit, "offset": p.offset}  # noqa: E731
        return {
            "arity": self.arity,
            "layers": [
                {"k": l.k, "fiber": [pt(p) for p in l.fiber], "tail": [pt(p) for p in l.tail]}
                for l in self.layers
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "BasicSet":
        pt = lambda d: OrbitPoint(d["orbit"], d["offset"])  # noqa: E731
        return cls(
            data["arity"],
            tuple(
                Layer(l["k"], tuple(map(pt, l["fiber"])), tuple(map(pt, l["tail"])))
                for l in data["layers"]
            ),
        )

    def __str__(self) -> str:
        if not self.layers:
            return "empty"
        return " ⊔ ".join(f"{len(l.fiber)}×M^{l.k}" for l in self.layers)


def basic_from_poly(poly: IntPoly, arity: int | None = None, prefix: str = "#fresh", start: int = 1) -> BasicSet:
    """A basic set with associated polynomial ``poly`` (nonnegative coefficients)."""
    if any(a < 0 for a in poly.coeffs):
        raise ValueError("basic sets have nonnegative associated polynomials")
    deg = len(poly.coeffs) - 1
    n = arity if arity is not None else max(deg, 0) + 1
    if n < deg + 1:
        raise ValueError(f"arity {n} too small for degree {deg}")
    counter = itertools.count(start)
    layers = []
    for k, a in enumerate(poly.coeffs):
        if a == 0:
            continue
        fiber = tuple(generic(f"{prefix}{next(counter)}") for _ in range(a))
        layers.append(Layer(k, fiber, (fiber[0],) * (n - 1 - k)))
    return BasicSet(n, tuple(layers))


@dataclass(frozen=True)
class BasicCertificate:
    class_a: IntPoly
    class_p: IntPoly
    class_n: IntPoly
    modulus: int

    @property
    def holds(self) -> bool:
        return (self.class_a + self.class_n).reduce(self.modulus) == self.class_p.reduce(self.modulus)


def to_basic(d: Decomposition, modulus: int, reduce: bool = True):
    """Basic sets ``P`` and ``Nset`` with ``[A] + [Nset] = [P]``.

    With ``reduce`` the class is taken mod N first, so ``Nset`` is empty;
    otherwise ``P`` and ``Nset`` carry the positive and negative parts of
    the integer class.  Both live in ``M^(n+1)`` for ``n`` at least the
    arity of ``d``, on fresh generic orbits.
    """
    c = int_class_of(d)
    if reduce:
        pos = IntPoly(c.reduce(modulus).coeffs)
        neg = IntPoly()
    else:
        pos = IntPoly(tuple(max(a, 0) for a in c.coeffs))
        neg = IntPoly(tuple(max(-a, 0) for a in c.coeffs))
    arity = max(d.arity, len(pos.coeffs), len(neg.coeffs)) + 1
    p = basic_from_poly(pos, arity)
    nset = basic_from_poly(neg, arity, start=sum(pos.coeffs) + 1)
    cert = BasicCertificate(c, p.polynomial(), nset.polynomial(), modulus)
    assert cert.holds
    return p, nset, cert


__all__ = [
    "BasicCertificate",
    "BasicSet",
    "Cell",
    "Decomposition",
    "Layer",
    "basic_from_poly",
    "cell_intersect",
    "cell_subtract",
    "class_preimage_cells",
    "complement",
    "decompose_formula",
    "difference",
    "disjointify",
    "disjointness_certificate",
    "from_cells",
    "from_simple",
    "intersection",
    "make_cell",
    "product",
    "to_basic",
    "union",
]
