"""Seeded random formulas, cells, maps and basic sets for property tests and ``fuzz``."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .core_sets import SimpleSet, simple_set
from .decompose import BasicSet, Cell, Layer, make_cell
from .k0 import IntPoly
from .syntax import And, Const, Eq, Exists, Forall, Formula, Not, Or, Term, Var, constant, free_variables

FREE = ("x", "y", "z")
BOUND = ("u", "v")


@dataclass(frozen=True)
class CorpusItem:
    formula: Formula
    variables: tuple[str, ...]
    modulus: int


def _term(rng: random.Random, names, modulus: int, max_shift: int) -> Term:
    k = rng.randint(0, max_shift)
    if names and rng.random() < 0.75:
        return Term(k, Var(rng.choice(names)))
    return Term(rng.randint(0, 1), Const(rng.randint(1, modulus)))


def _atom(rng, names, modulus, max_shift) -> Formula:
    lhs = _term(rng, names, modulus, max_shift)
    for _ in range(8):
        rhs = _term(rng, names, modulus, max_shift)
        # atoms on a single base are mostly trivial; prefer two bases
        if rhs.base != lhs.base and (isinstance(lhs.base, Var) or isinstance(rhs.base, Var)):
            break
    e = Eq(lhs, rhs)
    return Not(e) if rng.random() < 0.35 else e


def _qf(rng, names, modulus, max_shift, size: int) -> Formula:
    if size <= 1:
        return _atom(rng, names, modulus, max_shift)
    left = rng.randint(1, size - 1)
    a = _qf(rng, names, modulus, max_shift, left)
    b = _qf(rng, names, modulus, max_shift, size - left)
    node = And((a, b)) if rng.random() < 0.55 else Or((a, b))
    return Not(node) if rng.random() < 0.1 else node


def _mentions(phi: Formula, name: str) -> bool:
    return name in free_variables(phi)


def random_formula(
    rng: random.Random,
    modulus: int,
    max_free: int = 3,
    max_quantifiers: int = 2,
    max_shift: int = 3,
    max_vars: int = 4,
    max_atoms: int = 5,
) -> CorpusItem:
    """A constants-only formula with nested quantifiers over a prefix of ``x, y, z``."""
    n = rng.randint(1, max_free)
    q = rng.randint(0, min(max_quantifiers, max_vars - n))
    free = FREE[:n]
    bound = BOUND[:q]
    names = list(free)
    body_names = names + list(bound)
    phi = _qf(rng, body_names, modulus, max_shift, rng.randint(1, max_atoms))
    for b in reversed(bound):
        if not _mentions(phi, b):
            # make sure the quantifier binds something
            phi = And((phi, _atom(rng, [b] + names, modulus, max_shift)))
        phi = Exists(b, phi) if rng.random() < 0.7 else Forall(b, phi)
        if rng.random() < 0.2:
            phi = Not(phi)
    return CorpusItem(phi, free, modulus)


def corpus(seed: int, modulus: int, size: int, **kw) -> list[CorpusItem]:
    rng = random.Random(f"{seed}:{modulus}")
    return [random_formula(rng, modulus, **kw) for _ in range(size)]


def random_simple(rng: random.Random, arity: int, modulus: int, max_shift: int = 2, pin_rate: float = 0.2) -> SimpleSet:
    """A nonempty constants-only simple subset of ``M^arity``."""
    while True:
        links, pins = [], []
        for hi in range(1, arity):
            if rng.random() < 0.4:
                links.append((rng.randrange(hi), rng.randint(0, max_shift), hi))
        for c in range(arity):
            if rng.random() < pin_rate:
                pins.append((c, constant(rng.randint(1, modulus), rng.randint(0, 2))))
        s = simple_set(arity, links, pins)
        if not s.empty:
            return s


def random_cell(rng: random.Random, arity: int, modulus: int, max_negatives: int = 2) -> Cell:
    while True:
        b = random_simple(rng, arity, modulus, pin_rate=0.1)
        negs = [random_simple(rng, arity, modulus, pin_rate=0.4) for _ in range(rng.randint(0, max_negatives))]
        c = make_cell(b, negs)
        if c is not None:
            return c


def random_basic_poly(rng: random.Random, modulus: int, max_degree: int = 3) -> IntPoly:
    deg = rng.randint(0, max_degree)
    coeffs = [rng.randint(0, 2 * modulus) for _ in range(deg + 1)]
    return IntPoly(tuple(coeffs))


def equal_class_partner(rng: random.Random, p: IntPoly, modulus: int, max_degree: int = 3) -> IntPoly:
    """A polynomial with coefficients in ``[0, 2N]`` congruent to ``p`` mod N."""
    deg = max(len(p.coeffs) - 1, rng.randint(0, max_degree))
    out = []
    for j in range(deg + 1):
        r = p.coeff(j) % modulus
        choices = [a for a in range(0, 2 * modulus + 1) if a % modulus == r]
        out.append(rng.choice(choices))
    return IntPoly(tuple(out))


def basic_with_points(poly: IntPoly, start: int, arity: int | None = None) -> BasicSet:
    """Basic set on the orbit of ``c1``, fibers numbered from ``f^start(c1)``."""
    deg = len(poly.coeffs) - 1
    n = arity if arity is not None else max(deg, 0) + 1
    layers, nxt = [], start
    for k, a in enumerate(poly.coeffs):
        if a:
            fiber = tuple(constant(1, nxt + i) for i in range(a))
            nxt += a
            layers.append(Layer(k, fiber, (constant(1, 0),) * (n - 1 - k)))
    return BasicSet(n, tuple(layers))
