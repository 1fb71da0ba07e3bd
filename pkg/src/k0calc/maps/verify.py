"""Piecewise normal maps and their verification, symbolic and on boxes."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from ..decompose import Cell, Decomposition, cell_intersect, difference, make_cell
from ..k0 import ClassPoly, cell_int_class
from ..oracle import enumerate_cell
from .normal import ImageDescription, NormalMap, image, is_injective, is_well_defined


@dataclass
class PiecewiseMap:
    """Normal maps on pairwise disjoint cells of ``M^arity_in``."""

    arity_in: int
    arity_out: int
    pieces: list[NormalMap] = field(default_factory=list)

    def __post_init__(self):
        for g in self.pieces:
            if g.arity_in != self.arity_in or g.arity_out != self.arity_out:
                raise ValueError(f"piece {g} does not match arities {self.arity_in} -> {self.arity_out}")

    def domain(self) -> Decomposition:
        return Decomposition(self.arity_in, [g.domain for g in self.pieces])

    def piece_at(self, values: Sequence[int], modulus: int) -> list[int]:
        return [i for i, g in enumerate(self.pieces) if g.domain.contains(values, modulus)]

    def __call__(self, values: Sequence[int], modulus: int) -> tuple[int, ...] | None:
        hit = self.piece_at(values, modulus)
        return self.pieces[hit[0]](values, modulus) if hit else None

    def images(self, modulus: int) -> list[ImageDescription]:
        return [image(g, modulus) for g in self.pieces]

    def image_decomposition(self, modulus: int) -> Decomposition:
        cells = [c for d in self.images(modulus) if (c := d.cell()) is not None]
        return Decomposition(self.arity_out, cells)

    def __str__(self) -> str:
        return "\n".join(str(g) for g in self.pieces)

    def to_json(self) -> list:
        return [g.to_json() for g in self.pieces]

    @classmethod
    def from_json(cls, data: list, arity_in: int | None = None, arity_out: int | None = None) -> "PiecewiseMap":
        pieces = [NormalMap.from_json(d) for d in data]
        if pieces:
            arity_in, arity_out = pieces[0].arity_in, pieces[0].arity_out
        return cls(arity_in or 0, arity_out or 0, pieces)


def single(g: NormalMap) -> PiecewiseMap:
    return PiecewiseMap(g.arity_in, g.arity_out, [g])


# ---------------------------------------------------------------------------
# verification


@dataclass
class VerifyReport:
    mode: str
    checks: dict[str, bool] = field(default_factory=dict)
    counterexamples: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values()) and not self.counterexamples

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def fail(self, check: str, **example) -> None:
        self.checks[check] = False
        if example and len(self.counterexamples) < 20:
            self.counterexamples.append({"check": check, **example})

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "mode": self.mode,
            "checks": dict(self.checks),
            "counterexamples": self.counterexamples,
        }


def _covers(a: Decomposition, b: Decomposition) -> bool:
    """Whether ``b`` is a subset of ``a``."""
    return difference(b, a).is_empty


def _max_power(w: PiecewiseMap) -> int:
    return max((abs(o.power) for g in w.pieces for o in g.outs if o.src is not None), default=0)


def _max_level(d: Decomposition | None) -> int:
    if d is None:
        return 0
    return max((max(l) for c in d.cells for _, l in c.positive.groups), default=0)


def verify_map(
    w: PiecewiseMap,
    mode: str,
    domain: Decomposition,
    codomain: Decomposition | None,
    modulus: int,
    bound: int | None = None,
) -> VerifyReport:
    """Check ``w`` as an injection (into ``codomain`` if given) or a bijection.

    Symbolically: every piece is well defined and injective, the pieces
    partition ``domain``, piece images are disjoint and lie in
    ``codomain``, and for bijections cover it.  Then the same properties
    pointwise in the standard model, on points whose group roots lie below
    ``bound``.
    """
    if mode not in ("injective", "bijective"):
        raise ValueError("mode is 'injective' or 'bijective'")
    if mode == "bijective" and codomain is None:
        raise ValueError("bijective mode needs a codomain")
    rep = VerifyReport(mode)
    for key in ("well_defined", "injective", "domain_partition", "images_disjoint", "into_codomain", "onto_codomain"):
        rep.checks[key] = True
    if mode == "injective":
        del rep.checks["onto_codomain"]

    # symbolic
    for i, g in enumerate(w.pieces):
        if not is_well_defined(g, modulus):
            rep.fail("well_defined", piece=i)
        if not is_injective(g):
            rep.fail("injective", piece=i)
    pieces_dom = w.domain()
    for i, j in itertools.combinations(range(len(w.pieces)), 2):
        if cell_intersect(w.pieces[i].domain, w.pieces[j].domain) is not None:
            rep.fail("domain_partition", pieces=[i, j])
    if not (_covers(domain, pieces_dom) and _covers(pieces_dom, domain)):
        rep.fail("domain_partition")
    img = None
    if rep.checks["injective"] and rep.checks["well_defined"]:
        descs = w.images(modulus)
        cells = [d.cell() for d in descs]
        live = [c for c in cells if c is not None]
        for (i, a), (j, b) in itertools.combinations(enumerate(cells), 2):
            if a is not None and b is not None and cell_intersect(a, b) is not None:
                rep.fail("images_disjoint", pieces=[i, j])
        img = Decomposition(w.arity_out, live)
        if codomain is not None:
            if not _covers(codomain, img):
                rep.fail("into_codomain")
            if mode == "bijective" and not _covers(img, codomain):
                rep.fail("onto_codomain")

    # pointwise
    # a codomain point with roots below b has coordinates below b + level * N,
    # so its preimage has roots below b + (level + power) * N; each piece is
    # enumerated through its own groups, so far pinned points cost nothing
    b = bound if bound is not None else max(2 * modulus, 4)
    dom_bound = b + (_max_power(w) + _max_level(codomain) + 1) * modulus
    for cell in domain.cells:
        for x in enumerate_cell(cell, b, modulus):
            hit = w.piece_at(x, modulus)
            if len(hit) != 1:
                rep.fail("domain_partition", point=list(x), pieces=hit)
    seen: dict[tuple[int, ...], tuple[int, ...]] = {}
    for i, g in enumerate(w.pieces):
        for x in enumerate_cell(g.domain, dom_bound, modulus):
            if not domain.contains(x, modulus):
                rep.fail("domain_partition", point=list(x))
                continue
            if w.piece_at(x, modulus) != [i]:
                continue
            y = g(x, modulus)
            if y is None:
                rep.fail("well_defined", point=list(x))
                continue
            if y in seen and seen[y] != x:
                rep.fail("injective", points=[list(seen[y]), list(x)], value=list(y))
            seen[y] = x
            if codomain is not None and not codomain.contains(y, modulus):
                rep.fail("into_codomain", point=list(x), value=list(y))
    if mode == "bijective":
        for cell in codomain.cells:
            for y in enumerate_cell(cell, b, modulus):
                if y not in seen:
                    rep.fail("onto_codomain", value=list(y))
    return rep


def class_certificate(g: NormalMap, modulus: int) -> tuple[ClassPoly, ClassPoly]:
    """Classes of a piece's domain cell and of its image cell."""
    dom = cell_int_class(g.domain).reduce(modulus)
    c = image(g, modulus).cell()
    img = cell_int_class(c).reduce(modulus) if c is not None else ClassPoly(modulus)
    return dom, img


@dataclass
class AdaptedPiece:
    map: NormalMap
    image: ImageDescription
    domain_class: ClassPoly
    image_class: ClassPoly

    @property
    def certified(self) -> bool:
        return self.domain_class == self.image_class


def adapted_decomposition(a: Decomposition, w: PiecewiseMap, modulus: int) -> list[AdaptedPiece]:
    """Refine the cells of ``a`` along the pieces of ``w``, with image data per piece."""
    for i, j in itertools.combinations(range(len(w.pieces)), 2):
        if cell_intersect(w.pieces[i].domain, w.pieces[j].domain) is not None:
            raise ValueError(f"pieces {i} and {j} overlap")
    if not _covers(w.domain(), a):
        raise ValueError("the pieces do not cover the set")
    out = []
    for cell in a.cells:
        for g in w.pieces:
            c = cell_intersect(cell, g.domain)
            if c is None:
                continue
            h = g.restrict(c)
            dom_cls, img_cls = class_certificate(h, modulus)
            out.append(AdaptedPiece(h, image(h, modulus), dom_cls, img_cls))
    return out


def as_decomposition(cells: Sequence[Cell]) -> Decomposition:
    return Decomposition(cells[0].arity if cells else 0, list(cells))


__all__ = [
    "AdaptedPiece",
    "PiecewiseMap",
    "VerifyReport",
    "adapted_decomposition",
    "as_decomposition",
    "class_certificate",
    "single",
    "verify_map",
]
