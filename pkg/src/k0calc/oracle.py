"""Brute-force ground truth in the standard model ``N``, ``f(x) = x + N``, ``c_i = i - 1``.

Formulas are evaluated on whole boxes at once: free variable ``j`` lives on
numpy axis ``j`` and the bound variable at nesting depth ``d`` on axis
``n + d``, so a quantifier is an ``any``/``all`` over one axis.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .core_sets import SimpleSet, standard_value
from .syntax import (
    And,
    Bool,
    Const,
    Eq,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    Param,
    Term,
    Var,
    free_variables,
    has_generic_parameters,
    quantifier_depth,
    terms_of,
)

MAX_ARITY = 4
MAX_BOX = 128


class OracleError(ValueError):
    """Input outside what the standard-model oracle can decide."""


class OracleCapExceeded(OracleError):
    pass


@dataclass(frozen=True)
class StandardModel:
    modulus: int

    def f(self, x: int, k: int = 1) -> int:
        return x + k * self.modulus

    def constant(self, i: int) -> int:
        return i - 1

    def value(self, p) -> int:
        return standard_value(p, self.modulus)

    def check_axioms(self, sample: int | None = None) -> bool:
        """``f`` injective, misses exactly the constants, and has no short cycles."""
        n = self.modulus
        xs = range(sample if sample is not None else 10 * n)
        consts = {self.constant(i) for i in range(1, n + 1)}
        images = [self.f(x) for x in xs]
        if len(set(images)) != len(images) or consts & set(images):
            return False
        if any(self.f(x, k) == x for x in xs for k in range(1, 6)):
            return False
        # every non-constant is an image
        return all(y in consts or self.f(y - n) == y for y in xs)


# ---------------------------------------------------------------------------
# bounds


def formula_shift_bound(phi: Formula) -> int:
    """``S_max``: largest shift on a variable plus largest constant offset."""
    var_shift, const_off = 0, 0
    for t in terms_of(phi):
        if isinstance(t.base, Var):
            var_shift = max(var_shift, t.shift)
        elif isinstance(t.base, Const):
            const_off = max(const_off, t.shift)
    return var_shift + const_off


def witness_bounds(phi: Formula, box: int, modulus: int) -> list[int]:
    """Search range for the bound variable at each nesting depth."""
    step = (formula_shift_bound(phi) + 2) * modulus
    return [box + (d + 1) * step for d in range(quantifier_depth(phi))]


def _check_constants_only(phi: Formula) -> None:
    if has_generic_parameters(phi):
        raise OracleError("the standard model has no generic orbits")


# ---------------------------------------------------------------------------
# grid evaluation


class _Grid:
    def __init__(self, variables: Sequence[str], sizes: Sequence[int], bounds: Sequence[int], modulus: int):
        self.n = len(variables)
        self.ndim = self.n + len(bounds)
        self.modulus = modulus
        self.bounds = list(bounds)
        self.env = {v: self._axis(j, sizes[j]) for j, v in enumerate(variables)}

    def _axis(self, axis: int, size: int) -> np.ndarray:
        shape = [1] * self.ndim
        shape[axis] = size
        return np.arange(size, dtype=np.int64).reshape(shape)

    def term(self, t: Term):
        b = t.base
        if isinstance(b, Var):
            return self.env[b.name] + t.shift * self.modulus
        if isinstance(b, Const):
            return b.index - 1 + t.shift * self.modulus
        raise OracleError("the standard model has no generic orbits")

    def eval(self, phi: Formula, depth: int = 0):
        if isinstance(phi, Bool):
            return np.bool_(phi.value)
        if isinstance(phi, Eq):
            return np.equal(self.term(phi.lhs), self.term(phi.rhs))
        if isinstance(phi, Not):
            return np.logical_not(self.eval(phi.body, depth))
        if isinstance(phi, And):
            acc = np.bool_(True)
            for p in phi.parts:
                acc = np.logical_and(acc, self.eval(p, depth))
            return acc
        if isinstance(phi, Or):
            acc = np.bool_(False)
            for p in phi.parts:
                acc = np.logical_or(acc, self.eval(p, depth))
            return acc
        if isinstance(phi, (Exists, Forall)):
            axis = self.n + depth
            saved = self.env.get(phi.var)
            self.env[phi.var] = self._axis(axis, self.bounds[depth])
            body = np.asarray(self.eval(phi.body, depth + 1))
            if saved is None:
                del self.env[phi.var]
            else:
                self.env[phi.var] = saved
            if body.ndim == 0:
                return body
            if isinstance(phi, Exists):
                return body.any(axis=axis, keepdims=True)
            return body.all(axis=axis, keepdims=True)
        raise TypeError(f"not a formula: {phi!r}")


def evaluate_box(
    phi: Formula,
    variables: Sequence[str],
    box: int | Sequence[int],
    modulus: int,
    witness_bound: int | None = None,
) -> np.ndarray:
    """Truth table of ``phi`` on ``[0, box)^n`` with bounded witness search."""
    _check_constants_only(phi)
    extra = free_variables(phi) - set(variables)
    if extra:
        raise OracleError(f"free variables outside the interface: {sorted(extra)}")
    sizes = [box] * len(variables) if isinstance(box, int) else list(box)
    top = max(sizes, default=0)
    bounds = witness_bounds(phi, top, modulus)
    if witness_bound is not None and bounds:
        if witness_bound < bounds[0]:
            raise OracleError(f"witness bound {witness_bound} below the required {bounds[0]}")
        bounds = [witness_bound + (b - bounds[0]) for b in bounds]
    grid = _Grid(variables, sizes, bounds, modulus)
    val = np.asarray(grid.eval(phi))
    if val.ndim:
        # bound axes have been reduced to length 1
        val = val.reshape(val.shape[: len(variables)])
    return np.broadcast_to(val, tuple(sizes)).copy()


def eval_formula(
    phi: Formula,
    point: Sequence[int],
    variables: Sequence[str],
    modulus: int,
    witness_bound: int | None = None,
) -> bool:
    """Truth of ``phi`` at one tuple of naturals."""
    if any(v < 0 for v in point):
        raise OracleError("points are tuples of naturals")
    box = [v + 1 for v in point]
    table = evaluate_box(phi, variables, box, modulus, witness_bound)
    return bool(table[tuple(point)]) if variables else bool(table)


# ---------------------------------------------------------------------------
# counting


def _check_caps(n: int, box: int) -> None:
    if n > MAX_ARITY:
        raise OracleCapExceeded(f"arity {n} exceeds the oracle cap {MAX_ARITY}")
    if box > MAX_BOX:
        raise OracleCapExceeded(f"box {box} exceeds the oracle cap {MAX_BOX}")


def _as_formula(phi) -> Formula:
    return phi.to_formula() if hasattr(phi, "to_formula") else phi


def counts(phi, variables: Sequence[str], boxes: Iterable[int], modulus: int) -> dict[int, int]:
    """Solution counts in ``[0, B)^n`` for each ``B``, from one truth table."""
    phi = _as_formula(phi)
    boxes = sorted(set(boxes))
    n = len(variables)
    top = max(boxes)
    _check_caps(n, top)
    table = evaluate_box(phi, variables, top, modulus)
    out = {}
    for b in boxes:
        out[b] = int(table[(slice(0, b),) * n].sum()) if n else int(bool(table))
    return out


def count(phi, variables: Sequence[str], box: int, modulus: int) -> int:
    return counts(phi, variables, [box], modulus)[box]


def simple_mask(s: SimpleSet, box: int, modulus: int) -> np.ndarray:
    """Membership table of a constants-only simple set on ``[0, box)^n``."""
    n = s.arity
    shape = (box,) * n
    if s.empty:
        return np.zeros(shape, dtype=bool)
    axes = [np.arange(box, dtype=np.int64).reshape([box if j == i else 1 for j in range(n)]) for i in range(n)]
    mask = np.ones(shape, dtype=bool)
    links, pins = s.constraints()
    for lo, k, hi in links:
        mask &= axes[hi] == axes[lo] + k * modulus
    for c, p in pins:
        mask &= axes[c] == standard_value(p, modulus)
    return mask


def cell_mask(cell, box: int, modulus: int) -> np.ndarray:
    mask = simple_mask(cell.positive, box, modulus)
    for neg in cell.negatives:
        mask &= ~simple_mask(neg, box, modulus)
    return mask


def enumerate_simple(s: SimpleSet, bound: int, modulus: int) -> Iterable[tuple[int, ...]]:
    """Points of ``s`` whose free groups have level-0 value in ``[0, bound)``."""
    if s.empty:
        return
    base = [0] * s.arity
    for c, p in s.pinned:
        base[c] = standard_value(p, modulus)
    for roots in itertools.product(range(bound), repeat=len(s.groups)):
        v = list(base)
        for t, (coords, levels) in zip(roots, s.groups):
            for c, lv in zip(coords, levels):
                v[c] = t + lv * modulus
        yield tuple(v)


def enumerate_cell(cell, bound: int, modulus: int) -> Iterable[tuple[int, ...]]:
    for v in enumerate_simple(cell.positive, bound, modulus):
        if not any(n.contains(v, modulus) for n in cell.negatives):
            yield v


# ---------------------------------------------------------------------------
# counting polynomials


@dataclass(frozen=True)
class CountingPolynomial:
    """Integer polynomial in ``B`` equal to the box count for every ``B >= threshold``."""

    coeffs: tuple[int, ...]
    threshold: int
    samples: tuple[tuple[int, int], ...] = field(default=(), compare=False)

    @property
    def degree(self) -> float | int:
        return len(self.coeffs) - 1 if self.coeffs else float("-inf")

    def __call__(self, b: int) -> int:
        acc = 0
        for a in reversed(self.coeffs):
            acc = acc * b + a
        return acc

    def reduce(self, modulus: int):
        from .k0 import ClassPoly

        return ClassPoly(modulus, self.coeffs)

    def __str__(self) -> str:
        from .k0 import poly_text

        return poly_text(self.coeffs, "B")


def interpolate(points: Sequence[tuple[int, int]]) -> list[Fraction]:
    """Monomial coefficients of the polynomial through ``points`` (Newton form)."""
    xs = [Fraction(x) for x, _ in points]
    table = [Fraction(y) for _, y in points]
    newton = [table[0]]
    for level in range(1, len(points)):
        table = [(table[i + 1] - table[i]) / (xs[i + level] - xs[i]) for i in range(len(table) - 1)]
        newton.append(table[0])
    coeffs = [Fraction(0)] * len(points)
    basis = [Fraction(1)]
    for j, a in enumerate(newton):
        for i, b in enumerate(basis):
            coeffs[i] += a * b
        # basis *= (X - xs[j])
        nxt = [Fraction(0)] * (len(basis) + 1)
        for i, b in enumerate(basis):
            nxt[i + 1] += b
            nxt[i] -= xs[j] * b
        basis = nxt
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def count_threshold(qf, n: int, modulus: int) -> int:
    """Box size from which the count of a quantifier-free set is polynomial.

    A pin reaches value ``(offset + 1) * N``; a chain of links through the
    ``n`` coordinates spans at most ``(n - 1) * shift`` levels.
    """
    return modulus * (qf.max_offset() + max(n - 1, 0) * qf.max_shift() + 2)


def fit_counting_polynomial(qf, variables: Sequence[str], modulus: int) -> CountingPolynomial:
    """Fit through ``n + 1`` counts from the threshold and confirm at three more."""
    n = len(variables)
    b0 = count_threshold(qf, n, modulus)
    boxes = list(range(b0, b0 + n + 4))
    got = counts(qf, variables, boxes, modulus)
    fit = interpolate([(b, got[b]) for b in boxes[: n + 1]])
    if any(c.denominator != 1 for c in fit):
        raise AssertionError(f"non-integral counting polynomial {fit}")
    poly = CountingPolynomial(tuple(int(c) for c in fit), b0, tuple(sorted(got.items())))
    for b in boxes[n + 1 :]:
        if poly(b) != got[b]:
            raise AssertionError(f"count {got[b]} at B={b} disagrees with fitted polynomial {poly}")
    return poly


def export_counts_csv(samples: Iterable[tuple[int, int]], stream) -> None:
    w = csv.writer(stream)
    w.writerow(["B", "count"])
    for b, c in samples:
        w.writerow([b, c])


# ---------------------------------------------------------------------------
# class cross-check


@dataclass
class CrossCheckReport:
    formula: str
    modulus: int
    class_poly: object
    counting: CountingPolynomial
    dimension: float | int

    @property
    def class_match(self) -> bool:
        return self.counting.reduce(self.modulus) == self.class_poly

    @property
    def degree_match(self) -> bool:
        return self.counting.degree == self.dimension

    @property
    def passed(self) -> bool:
        return self.class_match and self.degree_match

    def to_json(self) -> dict:
        dim = self.dimension
        return {
            "formula": self.formula,
            "modulus": self.modulus,
            "class": self.class_poly.to_json(),
            "class_text": str(self.class_poly),
            "counting": list(self.counting.coeffs),
            "counting_text": str(self.counting),
            "threshold": self.counting.threshold,
            "dimension": dim if dim != float("-inf") else None,
            "class_match": self.class_match,
            "degree_match": self.degree_match,
            "status": "pass" if self.passed else "fail",
        }


def cross_check_class(phi: Formula, variables: Sequence[str], modulus: int) -> CrossCheckReport:
    """Symbolic class against the reduced counting polynomial of the same set."""
    from .decompose import disjointify
    from .k0 import class_of, dim_semiring_value
    from .qe import eliminate

    _check_constants_only(phi)
    qf = eliminate(phi, modulus)
    d = disjointify(qf, variables)
    return CrossCheckReport(
        str(phi), modulus, class_of(d, modulus), fit_counting_polynomial(qf, variables, modulus), dim_semiring_value(d)
    )


__all__ = [
    "CountingPolynomial",
    "CrossCheckReport",
    "MAX_ARITY",
    "MAX_BOX",
    "OracleCapExceeded",
    "OracleError",
    "StandardModel",
    "cell_mask",
    "count",
    "count_threshold",
    "counts",
    "cross_check_class",
    "enumerate_cell",
    "enumerate_simple",
    "eval_formula",
    "evaluate_box",
    "export_counts_csv",
    "fit_counting_polynomial",
    "formula_shift_bound",
    "interpolate",
    "simple_mask",
    "witness_bounds",
]
