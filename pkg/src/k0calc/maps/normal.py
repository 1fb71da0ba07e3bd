"""Normal functions: coordinatewise f-powers of selected input coordinates.

An output coordinate is either ``f^power(x_src)`` (``power`` may be
negative, in which case the domain must avoid the first ``-power`` levels
of every named-constant orbit at ``x_src``) or a pinned orbit point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..core_sets import SimpleSet, empty_set, intersect, simple_set, standard_value
from ..decompose import Cell, make_cell
from ..syntax import OrbitPoint, constant


@dataclass(frozen=True)
class Out:
    """One output coordinate: ``f^power(x_src)``, or ``point`` when ``src`` is ``None``."""

    src: int | None
    power: int = 0
    point: OrbitPoint | None = None

    @classmethod
    def of(cls, src: int, power: int = 0) -> "Out":
        return cls(src, power)

    @classmethod
    def pin(cls, point: OrbitPoint) -> "Out":
        return cls(None, 0, point)

    def __str__(self) -> str:
        if self.src is None:
            return str(self.point)
        x = f"x{self.src + 1}"
        if self.power == 0:
            return x
        return f"f^{self.power}({x})" if self.power != 1 else f"f({x})"


Exprs = tuple[Out, ...]


def compose_outs(outer: Sequence[Out], inner: Sequence[Out]) -> Exprs:
    """Expressions of ``outer ∘ inner``."""
    res = []
    for o in outer:
        if o.src is None:
            res.append(o)
            continue
        i = inner[o.src]
        if i.src is None:
            res.append(Out.pin(i.point.shifted(o.power)))
        else:
            res.append(Out(i.src, i.power + o.power))
    return tuple(res)


def eval_outs(outs: Sequence[Out], values: Sequence[int], modulus: int) -> tuple[int, ...] | None:
    """Evaluate in the standard model; ``None`` where a negative power is undefined."""
    res = []
    for o in outs:
        if o.src is None:
            res.append(standard_value(o.point, modulus))
        else:
            v = values[o.src] + o.power * modulus
            if v < 0:
                return None
            res.append(v)
    return tuple(res)


def pullback_simple(s: SimpleSet, outs: Sequence[Out], n: int) -> SimpleSet:
    """``{x in M^n : outs(x) in s}`` on the part of ``M^n`` where ``outs`` is defined."""
    if s.empty:
        return empty_set(n)
    links, pins = s.constraints()
    out_links, out_pins = [], []
    for lo, k, hi in links:
        a, b = outs[hi], outs[lo]
        # f^k(y_lo) = y_hi
        if a.src is None and b.src is None:
            if b.point.shifted(k) != a.point:
                return empty_set(n)
        elif a.src is None:
            out_pins.append((b.src, a.point.shifted(-k - b.power)))
        elif b.src is None:
            out_pins.append((a.src, b.point.shifted(k - a.power)))
        else:
            out_links.append((b.src, k + b.power - a.power, a.src))
    for c, p in pins:
        o = outs[c]
        if o.src is None:
            if o.point != p:
                return empty_set(n)
        else:
            out_pins.append((o.src, p.shifted(-o.power)))
    for _, p in out_pins:
        if not p.valid:
            return empty_set(n)
    return simple_set(n, out_links, out_pins)


def guard_points(modulus: int, depth: int) -> list[OrbitPoint]:
    """The ``N * depth`` points without a ``depth``-th preimage."""
    return [constant(i, r) for r in range(depth) for i in range(1, modulus + 1)]


def _pin_set(n: int, coord: int, p: OrbitPoint) -> SimpleSet:
    return simple_set(n, [], [(coord, p)])


def undefined_parts(domain: SimpleSet, outs: Sequence[Out], modulus: int) -> list[SimpleSet]:
    """Simple subsets of ``domain`` on which some negative power has no value."""
    bad = []
    for o in outs:
        if o.src is not None and o.power < 0:
            for p in guard_points(modulus, -o.power):
                t = intersect(domain, _pin_set(domain.arity, o.src, p))
                if not t.empty:
                    bad.append(t)
    return bad


@dataclass(frozen=True)
class Pushed:
    """Image data of a simple set: ``positive`` minus the pinned slices."""

    positive: SimpleSet
    slices: tuple[tuple[int, tuple[OrbitPoint, ...]], ...] = ()

    def slice_sets(self) -> list[SimpleSet]:
        m = self.positive.arity
        return [
            intersect(self.positive, _pin_set(m, c, p)) for c, pts in self.slices for p in pts
        ]


def push_simple(s: SimpleSet, outs: Sequence[Out], modulus: int) -> Pushed:
    """Image of the defined part of ``s`` under ``outs``.

    Each free group of ``s`` is a copy of ``M`` through its level-0
    coordinate ``t``; an output ``f^power(x_c)`` has degree
    ``level(c) + power`` in ``t``.  With ``mu`` the least degree in a group,
    the outputs are ``f^(degree - mu)(u)`` for ``u = f^mu(t)``, which runs
    over all of ``M`` when ``mu <= 0`` and over ``M`` minus the ``N * mu``
    points of its first ``mu`` levels otherwise.
    """
    m = len(outs)
    if s.empty:
        return Pushed(empty_set(m))
    hits: dict[int, list[tuple[int, int]]] = {}
    pins: list[tuple[int, OrbitPoint]] = []
    for i, o in enumerate(outs):
        if o.src is None:
            pins.append((i, o.point))
            continue
        where = s.locate(o.src)
        if isinstance(where, OrbitPoint):
            p = where.shifted(o.power)
            if not p.valid:
                return Pushed(empty_set(m))
            pins.append((i, p))
        else:
            gi, level = where
            hits.setdefault(gi, []).append((i, level + o.power))
    links, slices = [], []
    for gi in sorted(hits):
        degs = hits[gi]
        mu = min(d for _, d in degs)
        anchor = min(i for i, d in degs if d == mu)
        links += [(anchor, d - mu, i) for i, d in degs if i != anchor]
        if mu > 0:
            slices.append((anchor, tuple(guard_points(modulus, mu))))
    return Pushed(simple_set(m, links, pins), tuple(slices))


# ---------------------------------------------------------------------------
# normal maps


@dataclass(frozen=True)
class NormalMap:
    """A normal function on a cell.

    In the ``sigma``/``shifts`` convention, output ``i`` satisfies
    ``f^shifts[i](y_i) = x_sigma[i]``; internally ``power = -shift``.
    """

    domain: Cell
    outs: Exprs = field(default=())

    @classmethod
    def from_selector(cls, domain: Cell, sigma, shifts, pinned=None) -> "NormalMap":
        """Build from 0-based ``sigma`` (``None`` at pinned outputs) and shifts ``k_i``."""
        pinned = dict(pinned or {})
        outs = []
        for i, (src, k) in enumerate(zip(sigma, shifts)):
            outs.append(Out.pin(pinned[i]) if i in pinned else Out(src, -k))
        return cls(domain, tuple(outs))

    @property
    def arity_in(self) -> int:
        return self.domain.arity

    @property
    def arity_out(self) -> int:
        return len(self.outs)

    @property
    def sigma(self) -> list[int | None]:
        return [o.src for o in self.outs]

    @property
    def shifts(self) -> list[int]:
        return [-o.power if o.src is not None else 0 for o in self.outs]

    @property
    def pinned(self) -> dict[int, OrbitPoint]:
        return {i: o.point for i, o in enumerate(self.outs) if o.src is None}

    def __call__(self, values: Sequence[int], modulus: int) -> tuple[int, ...] | None:
        return eval_outs(self.outs, values, modulus)

    def restrict(self, cell: Cell) -> "NormalMap":
        return NormalMap(cell, self.outs)

    def __str__(self) -> str:
        return f"{self.domain} -> (" + ", ".join(map(str, self.outs)) + ")"

    def to_json(self) -> dict:
        return {
            "cell": self.domain.to_json(),
            "sigma": [None if s is None else s + 1 for s in self.sigma],
            "shifts": self.shifts,
            "pinned": [
                {"coord": i + 1, "orbit": p.orbit, "offset": p.offset} for i, p in self.pinned.items()
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "NormalMap":
        pinned = {d["coord"] - 1: OrbitPoint(d["orbit"], d["offset"]) for d in data.get("pinned", [])}
        sigma = [None if s is None else s - 1 for s in data["sigma"]]
        return cls.from_selector(Cell.from_json(data["cell"]), sigma, data["shifts"], pinned)


def identity_map(cell: Cell) -> NormalMap:
    return NormalMap(cell, tuple(Out(i) for i in range(cell.arity)))


def shift_map(cell: Cell, power: int, coord: int = 0) -> NormalMap:
    """Apply ``f^power`` to one coordinate, identity elsewhere."""
    return NormalMap(
        cell, tuple(Out(i, power if i == coord else 0) for i in range(cell.arity))
    )


def is_well_defined(g: NormalMap, modulus: int) -> bool:
    """Whether every negative power has a value throughout the domain cell."""
    return all(make_cell(t, g.domain.negatives) is None for t in undefined_parts(g.domain.positive, g.outs, modulus))


def is_injective(g: NormalMap) -> bool:
    """Injective iff the selected coordinates meet every free group of the positive."""
    pos = g.domain.positive
    if pos.empty:
        return True
    hit = set()
    for o in g.outs:
        if o.src is not None:
            where = pos.locate(o.src)
            if not isinstance(where, OrbitPoint):
                hit.add(where[0])
    return len(hit) == len(pos.groups)


def normal_extension(g: NormalMap, modulus: int) -> NormalMap:
    """The same expressions on the whole positive ``B`` of the domain cell.

    The extension is unique, since ``B`` is the closure of the cell; it
    is total only when no negative power loses its value on ``B``.
    """
    ext = NormalMap(Cell(g.domain.positive), g.outs)
    if not is_well_defined(ext, modulus):
        raise ValueError(f"{g} has no total normal extension to {g.domain.positive}")
    return ext


@dataclass(frozen=True)
class ImageDescription:
    """``positive`` minus the slices at each coordinate minus the images of the domain negatives."""

    positive: SimpleSet
    slices: tuple[tuple[int, tuple[OrbitPoint, ...]], ...]
    negative_images: tuple[SimpleSet, ...]

    def slice_sizes(self) -> dict[int, int]:
        return {c: len(pts) for c, pts in self.slices}

    def cell(self) -> Cell | None:
        pushed = Pushed(self.positive, self.slices)
        return make_cell(self.positive, pushed.slice_sets() + list(self.negative_images))

    def to_json(self) -> dict:
        return {
            "positive": self.positive.to_json(),
            "slices": [
                {"coord": c + 1, "points": [{"orbit": p.orbit, "offset": p.offset} for p in pts]}
                for c, pts in self.slices
            ],
            "negative_images": [s.to_json() for s in self.negative_images],
        }


def image(g: NormalMap, modulus: int) -> ImageDescription:
    """Image of an injective normal map on its cell."""
    if not is_injective(g):
        raise ValueError(f"{g} is not injective")
    main = push_simple(g.domain.positive, g.outs, modulus)
    negs = tuple(push_simple(n, g.outs, modulus).positive for n in g.domain.negatives)
    return ImageDescription(main.positive, main.slices, negs)


def parametrization(b: SimpleSet) -> tuple[Out, ...]:
    """Expressions ``M^dim -> b`` sending group roots to their level-0 coordinates."""
    outs: list[Out | None] = [None] * b.arity
    for gi, (coords, levels) in enumerate(b.groups):
        for c, lv in zip(coords, levels):
            outs[c] = Out(gi, lv)
    for c, p in b.pinned:
        outs[c] = Out.pin(p)
    return tuple(outs)


def selector_map(b: SimpleSet) -> tuple[Out, ...]:
    """Expressions ``b -> M^dim`` reading each group at its determining coordinate."""
    return tuple(Out(c) for c in b.determining())


__all__ = [
    "ImageDescription",
    "NormalMap",
    "Out",
    "Pushed",
    "compose_outs",
    "eval_outs",
    "guard_points",
    "identity_map",
    "image",
    "is_injective",
    "is_well_defined",
    "normal_extension",
    "parametrization",
    "pullback_simple",
    "push_simple",
    "selector_map",
    "shift_map",
    "undefined_parts",
]
