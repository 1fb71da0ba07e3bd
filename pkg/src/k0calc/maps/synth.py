"""Explicit piecewise-normal witnesses.

Everything is built from one move: ``x1 -> f^r(x1)`` maps ``M^(j+1)`` onto
``M^(j+1)`` minus ``N * r`` slices ``{x1 = f^s(c_l)} x M^j``, so ``N * r``
spare blocks of dimension ``j`` can be absorbed into (or emitted from) a
block of dimension ``j + 1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from ..core_sets import SimpleSet, full_space, intersect, simple_set
from ..decompose import BasicSet, Cell, Decomposition, Layer, from_cells, from_simple, make_cell, product
from ..k0 import ClassPoly, IntPoly
from ..syntax import OrbitPoint, constant
from .normal import NormalMap, Out, compose_outs, parametrization, pullback_simple, selector_map
from .verify import PiecewiseMap, VerifyReport, verify_map


class ClassMismatch(ValueError):
    """No bijection, not even a stable one: the classes differ."""

    def __init__(self, left: ClassPoly, right: ClassPoly):
        super().__init__(f"classes differ: {left} vs {right}")
        self.left = left
        self.right = right


class NoInjection(ValueError):
    """N does not divide k, so ``M`` and ``M`` minus ``k`` points have different classes."""

    def __init__(self, k: int, left: ClassPoly, right: ClassPoly):
        super().__init__(f"no definable bijection M -> M minus {k} points: {left} vs {right}")
        self.k = k
        self.left = left
        self.right = right


# ---------------------------------------------------------------------------
# blocks {a} x M^k x tail


@dataclass(frozen=True)
class Block:
    fiber: OrbitPoint
    k: int
    tail: tuple[OrbitPoint, ...]

    @property
    def arity(self) -> int:
        return 1 + self.k + len(self.tail)

    def simple(self) -> SimpleSet:
        pins = [(0, self.fiber)] + [(1 + self.k + i, p) for i, p in enumerate(self.tail)]
        return simple_set(self.arity, [], pins)

    def cell(self) -> Cell:
        return Cell(self.simple())

    def pinned_outs(self) -> tuple[Out, ...]:
        return tuple(Out.pin(p) for p in self.tail)


def blocks_of(b: BasicSet, arity: int, pad: OrbitPoint) -> list[Block]:
    out = []
    for layer in b.layers:
        tail = layer.tail + (pad,) * (arity - b.arity)
        out += [Block(a, layer.k, tail) for a in layer.fiber]
    return out


def _match(u: Block, v: Block) -> NormalMap:
    outs = (Out.pin(v.fiber),) + tuple(Out(1 + i) for i in range(u.k)) + v.pinned_outs()
    return NormalMap(u.cell(), outs)


def _slices(modulus: int, depth: int) -> list[OrbitPoint]:
    return [constant(l, s) for s in range(depth) for l in range(1, modulus + 1)]


def _absorb(u: Block, v: Block, extras: Sequence[Block], modulus: int) -> list[NormalMap]:
    """Host ``u -> v`` by ``f^r`` on the first free coordinate; extras fill the missed slices."""
    j = u.k - 1
    r = len(extras) // modulus
    pieces = [
        NormalMap(
            u.cell(),
            (Out.pin(v.fiber), Out(1, r)) + tuple(Out(2 + i) for i in range(j)) + v.pinned_outs(),
        )
    ]
    for e, p in zip(extras, _slices(modulus, r)):
        outs = (Out.pin(v.fiber), Out.pin(p)) + tuple(Out(1 + i) for i in range(j)) + v.pinned_outs()
        pieces.append(NormalMap(e.cell(), outs))
    return pieces


def _emit(u: Block, v: Block, extras: Sequence[Block], modulus: int) -> list[NormalMap]:
    """Host ``u -> v`` by ``f^-r`` off the first ``r`` levels; those slices go to the extras."""
    j = u.k - 1
    r = len(extras) // modulus
    host = u.simple()
    slices = [intersect(host, simple_set(u.arity, [], [(1, p)])) for p in _slices(modulus, r)]
    pieces = [
        NormalMap(
            make_cell(host, slices),
            (Out.pin(v.fiber), Out(1, -r)) + tuple(Out(2 + i) for i in range(j)) + v.pinned_outs(),
        )
    ]
    for e, s in zip(extras, slices):
        outs = (Out.pin(e.fiber),) + tuple(Out(2 + i) for i in range(j)) + e.pinned_outs()
        pieces.append(NormalMap(Cell(s), outs))
    return pieces


@dataclass
class BijectionWitness:
    """A bijection ``domain -> codomain`` where ``domain = U ⊔ aux`` and ``codomain = V ⊔ aux``."""

    aux: BasicSet
    domain: Decomposition
    codomain: Decomposition
    map: PiecewiseMap

    def verify(self, modulus: int, bound: int | None = None) -> VerifyReport:
        return verify_map(self.map, "bijective", self.domain, self.codomain, modulus, bound)

    def to_json(self) -> dict:
        return {
            "aux": self.aux.to_json(),
            "domain": self.domain.to_json(),
            "codomain": self.codomain.to_json(),
            "map": self.map.to_json(),
        }


def _fresh_constants(used: Sequence[OrbitPoint], count: int) -> list[OrbitPoint]:
    top = max((p.offset for p in used if p.is_constant), default=-1)
    return [constant(1, top + 1 + i) for i in range(count)]


def synthesize_bijection(u: BasicSet, v: BasicSet, modulus: int) -> BijectionWitness:
    """A piecewise-normal bijection ``U ⊔ C -> V ⊔ C`` for basic sets of equal class.

    Degrees are adjusted from the top down.  ``P - Q = N * R``; a nonzero
    ``r_j`` is settled by a matched pair of dimension ``j + 1`` acting as
    host.  ``C`` gets a block of dimension ``j + 1`` exactly when no such
    pair exists.  Both sides are padded with pinned coordinates to one
    common arity.
    """
    p, q = u.polynomial(), v.polynomial()
    if p.reduce(modulus) != q.reduce(modulus):
        raise ClassMismatch(p.reduce(modulus), q.reduce(modulus))
    diff = p - q
    rs = [a // modulus for a in diff.coeffs]
    top = max(len(p.coeffs), len(q.coeffs)) - 1
    needs_host = [j for j, r in enumerate(rs) if r]
    arity = max(u.arity, v.arity, top + 2 if needs_host else 0)
    used = [a for b in (u, v) for l in b.layers for a in l.fiber + l.tail]
    pad = constant(1, 0)
    ub = blocks_of(u, arity, pad)
    vb = blocks_of(v, arity, pad)
    by_dim = lambda bs, j: [b for b in bs if b.k == j]  # noqa: E731
    aux_dims = [j + 1 for j in needs_host if not (by_dim(ub, j + 1) and by_dim(vb, j + 1))]
    fresh = _fresh_constants(used, len(aux_dims))
    aux_blocks = [Block(a, k, (pad,) * (arity - 1 - k)) for a, k in zip(fresh, aux_dims)]
    pieces: list[NormalMap] = []
    for j in range(top + 2):
        us = [b for b in aux_blocks if b.k == j] + by_dim(ub, j)
        vs = [b for b in aux_blocks if b.k == j] + by_dim(vb, j)
        m = min(len(us), len(vs))
        r = rs[j - 1] if 1 <= j <= len(rs) else 0
        for i in range(m):
            if i == 0 and r:
                # unmatched blocks one degree down, in the order used for matching
                below_u = [b for b in aux_blocks if b.k == j - 1] + by_dim(ub, j - 1)
                below_v = [b for b in aux_blocks if b.k == j - 1] + by_dim(vb, j - 1)
                mm = min(len(below_u), len(below_v))
                if r > 0:
                    pieces += _absorb(us[0], vs[0], below_u[mm:], modulus)
                else:
                    pieces += _emit(us[0], vs[0], below_v[mm:], modulus)
            else:
                pieces.append(_match(us[i], vs[i]))
    aux_layers = tuple(
        Layer(k, tuple(b.fiber for b in aux_blocks if b.k == k), (pad,) * (arity - 1 - k))
        for k in sorted({b.k for b in aux_blocks})
    )
    aux = BasicSet(arity, aux_layers)
    dom = Decomposition(arity, [b.cell() for b in aux_blocks + ub])
    cod = Decomposition(arity, [b.cell() for b in aux_blocks + vb])
    return BijectionWitness(aux, dom, cod, PiecewiseMap(arity, arity, pieces))


def basic_of_poly(poly: IntPoly, modulus: int | None = None, arity: int | None = None, start: int = 0) -> BasicSet:
    """A basic set of constant-orbit points with polynomial ``poly``.

    Fibers use ``f^start(c1), f^(start+1)(c1), ...`` so the standard-model
    oracle can check witnesses on it.
    """
    if modulus is not None:
        poly = IntPoly(poly.reduce(modulus).coeffs)
    deg = len(poly.coeffs) - 1
    n = arity if arity is not None else max(deg, 0) + 1
    counter = itertools.count(start)
    layers = []
    for k, a in enumerate(poly.coeffs):
        if a:
            fiber = tuple(constant(1, next(counter)) for _ in range(a))
            layers.append(Layer(k, fiber, (constant(1, 0),) * (n - 1 - k)))
    return BasicSet(n, tuple(layers))


# ---------------------------------------------------------------------------
# M -> M minus k points


def default_points(k: int, modulus: int) -> list[OrbitPoint]:
    """``c1, ..., cN, f(c1), ..., f(cN), ...``: the first ``k`` points by level."""
    return [constant(i % modulus + 1, i // modulus) for i in range(k)]


@dataclass
class InjectionWitness:
    domain: Decomposition
    codomain: Decomposition
    map: PiecewiseMap

    def verify(self, modulus: int, bound: int | None = None) -> VerifyReport:
        return verify_map(self.map, "bijective", self.domain, self.codomain, modulus, bound)

    def to_json(self) -> dict:
        return {"domain": self.domain.to_json(), "codomain": self.codomain.to_json(), "map": self.map.to_json()}


def injection_into_complement(k: int, modulus: int, points: Sequence[OrbitPoint] | None = None) -> InjectionWitness:
    """A definable bijection from ``M`` onto ``M`` minus ``k`` points, when ``N | k``.

    The base map is ``f^(k/N)``, which misses the first ``k/N`` levels
    ``P``.  Preimages of chosen points outside ``P`` are redirected to the
    points of ``P`` that were not chosen.
    """
    if k < 0:
        raise ValueError("k is a natural number")
    pts = list(points) if points is not None else default_points(k, modulus)
    if len(pts) != k:
        raise ValueError(f"expected {k} points, got {len(pts)}")
    if len(set(pts)) != k:
        raise ValueError("duplicate points")
    if any(not p.valid for p in pts):
        raise ValueError("invalid orbit point")
    line = full_space(1)
    pin = lambda p: simple_set(1, [], [(0, p)])  # noqa: E731
    codomain = Decomposition(1, [make_cell(line, [pin(p) for p in pts])])
    domain = from_simple(line)
    if k % modulus:
        raise NoInjection(k, ClassPoly.x_power(modulus, 1), ClassPoly(modulus, (-k, 1)))
    r = k // modulus
    level = set(default_points(k, modulus))
    chosen = set(pts)
    movers = sorted(p.shifted(-r) for p in pts if p not in level)
    targets = sorted(p for p in level if p not in chosen)
    main = make_cell(line, [pin(p) for p in movers])
    pieces = [NormalMap(main, (Out(0, r),))]
    pieces += [NormalMap(Cell(pin(a)), (Out.pin(b),)) for a, b in zip(movers, targets)]
    return InjectionWitness(domain, codomain, PiecewiseMap(1, 1, pieces))


# ---------------------------------------------------------------------------
# dimension injections M^d -> F x A and A -> F' x M^d


@dataclass
class DimInjections:
    dimension: int
    into: PiecewiseMap
    into_codomain: Decomposition
    from_: PiecewiseMap
    from_codomain: Decomposition
    domain: Decomposition

    @property
    def into_tags(self) -> int:
        return len({g.outs[0].point for g in self.into.pieces})

    @property
    def from_tags(self) -> int:
        return len({g.outs[0].point for g in self.from_.pieces})

    def verify(self, modulus: int, bound: int | None = None) -> tuple[VerifyReport, VerifyReport]:
        cube = from_simple(full_space(self.dimension))
        return (
            verify_map(self.into, "injective", cube, self.into_codomain, modulus, bound),
            verify_map(self.from_, "injective", self.domain, self.from_codomain, modulus, bound),
        )


def _tagged(tags: Sequence[OrbitPoint], target: Decomposition) -> Decomposition:
    cells = []
    for t in tags:
        cells += product(from_simple(simple_set(1, [], [(0, t)])), target).cells
    return Decomposition(1 + target.arity, cells)


def _reach(sets: Sequence[SimpleSet]) -> int:
    r = 0
    for s in sets:
        r = max([r] + [abs(p.offset) for _, p in s.pinned] + [max(l) for _, l in s.groups])
    return r


def dim_injections(a: Decomposition) -> DimInjections:
    """Injections ``M^d -> F x A`` and ``A -> F' x M^d`` for ``d = dim A``.

    The second tags each cell and reads its determining coordinates.  The
    first parametrizes a top-dimensional cell ``B \\ ∪ B_j`` by ``M^d``; the
    parameters landing in some ``B_j`` form a lower-dimensional set, which
    is sent through its own determining coordinates into a copy of the
    same construction one dimension lower, under a new tag.  Lower copies
    are slices of ``M^d`` at pinned points far enough up the orbit of
    ``c1`` to avoid every constraint of the ``B_j``.
    """
    if a.is_empty:
        raise ValueError("the empty set has no dimension injections")
    d = max(c.dimension for c in a.cells)
    from_tags = [constant(1, i) for i in range(len(a.cells))]
    pad = constant(1, 0)
    from_pieces = []
    for t, c in zip(from_tags, a.cells):
        sel = selector_map(c.positive)
        outs = (Out.pin(t),) + sel + (Out.pin(pad),) * (d - len(sel))
        from_pieces.append(NormalMap(c, outs))
    from_map = PiecewiseMap(a.arity, 1 + d, from_pieces)
    from_cod = _tagged(from_tags, from_simple(full_space(d)))

    top = next(c for c in a.cells if c.dimension == d)
    phi = parametrization(top.positive)
    gap = _reach([top.positive, *top.negatives]) + 1
    pads = [constant(1, (i + 2) * (gap + 1)) for i in range(d)]
    tags = itertools.count()

    def embed(e: int) -> list[tuple[Cell, tuple[Out, ...]]]:
        psi = compose_outs(phi, tuple(Out(i) for i in range(e)) + tuple(Out.pin(p) for p in pads[e:d]))
        bads = [b for n in top.negatives if not (b := pullback_simple(n, psi, e)).empty]
        if any(b.dimension >= e for b in bads):
            raise AssertionError("padding slice meets a negative in full dimension")
        out = []
        good = make_cell(full_space(e), bads)
        if good is not None:
            out.append((good, (Out.pin(constant(1, next(tags))),) + psi))
        for cell in from_cells(e, [Cell(b) for b in bads]).cells:
            sel = selector_map(cell.positive)
            for sub, outs in embed(len(sel)):
                pos = intersect(cell.positive, pullback_simple(sub.positive, sel, e))
                negs = list(cell.negatives) + [pullback_simple(n, sel, e) for n in sub.negatives]
                piece = make_cell(pos, negs)
                if piece is not None:
                    out.append((piece, compose_outs(outs, sel)))
        return out

    into_pieces = [NormalMap(c, o) for c, o in embed(d)]
    into_tags = sorted({g.outs[0].point for g in into_pieces})
    into_map = PiecewiseMap(d, 1 + a.arity, into_pieces)
    return DimInjections(d, into_map, _tagged(into_tags, a), from_map, from_cod, a)


__all__ = [
    "BijectionWitness",
    "Block",
    "ClassMismatch",
    "DimInjections",
    "InjectionWitness",
    "NoInjection",
    "basic_of_poly",
    "default_points",
    "dim_injections",
    "injection_into_complement",
    "synthesize_bijection",
]
