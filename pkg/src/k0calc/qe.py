"""Quantifier elimination for the theory of a cycle-free f with coimage {c1..cN}.

Quantifiers are removed innermost first.  The body is put in DNF and, in
each conjunct, the bound variable ``y`` is eliminated by one of three
rules:

1. a positive literal ``y = f^k(t)`` with ``t`` free of ``y``: substitute;
2. a positive literal ``f^k(y) = z`` with ``k >= 1``: every other literal
   ``f^a(y) = s`` is rewritten as ``f^a(z) = f^k(s)``, and the guard
   ``z != f^j(c_i)`` for ``j < k`` asserts that ``z`` has a k-th preimage;
3. ``y`` occurs only in disequalities: drop them, since each excludes at
   most one value of ``y`` and models are infinite.

Universal quantifiers go through ``A y. p == ~E y. ~p``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .core_sets import atoms_of, from_positive_atoms, intersect
from .syntax import (
    And,
    Atom,
    Bool,
    Eq,
    Exists,
    Forall,
    Formula,
    Link,
    Not,
    Or,
    Pin,
    Term,
    Trivial,
    Var,
    atom_formula,
    atom_terms,
    atom_variables,
    conj,
    constant,
    disj,
    normalize_atom,
)


@dataclass(frozen=True, order=True)
class Literal:
    atom: Atom
    positive: bool = True

    def negate(self) -> "Literal":
        return Literal(self.atom, not self.positive)

    def variables(self) -> tuple[str, ...]:
        return atom_variables(self.atom)

    def __str__(self) -> str:
        return print_literal(self)


def _lit_key(lit: Literal):
    a = lit.atom
    return (not lit.positive, type(a).__name__, str(a))


def print_literal(lit: Literal) -> str:
    phi = atom_formula(lit.atom)
    return str(phi if lit.positive else Not(phi))


Conjunct = tuple[Literal, ...]


@dataclass(frozen=True)
class QFFormula:
    """Disjunction of conjunctions of normalized literals.

    ``QFFormula(())`` is false; ``QFFormula(((),))`` is true.
    """

    disjuncts: tuple[Conjunct, ...]

    @property
    def is_false(self) -> bool:
        return not self.disjuncts

    @property
    def is_true(self) -> bool:
        return any(not c for c in self.disjuncts)

    def to_formula(self) -> Formula:
        return disj(
            conj(atom_formula(l.atom) if l.positive else Not(atom_formula(l.atom)) for l in c)
            for c in self.disjuncts
        )

    def variables(self) -> set[str]:
        return {v for c in self.disjuncts for l in c for v in l.variables()}

    def max_shift(self) -> int:
        return max(
            (l.atom.shift for c in self.disjuncts for l in c if isinstance(l.atom, Link)), default=0
        )

    def max_offset(self) -> int:
        return max(
            (abs(l.atom.point.offset) for c in self.disjuncts for l in c if isinstance(l.atom, Pin)),
            default=0,
        )

    def __str__(self) -> str:
        return str(self.to_formula())


QF_TRUE = QFFormula(((),))
QF_FALSE = QFFormula(())


# ---------------------------------------------------------------------------
# conjunct simplification


def simplify_conjunct(lits: Iterable[Literal]) -> Conjunct | None:
    """Canonical equivalent conjunct, or ``None`` when it is unsatisfiable.

    Positive literals are replaced by the canonical constraints of the simple
    set they define; negative literals entailed false are fatal, negative
    literals already excluded by the positives are dropped.
    """
    pos: list[Atom] = []
    neg: list[Atom] = []
    for lit in lits:
        a = lit.atom
        if isinstance(a, Trivial):
            if a.value != lit.positive:
                return None
            continue
        (pos if lit.positive else neg).append(a)
    names = sorted({v for a in pos + neg for v in atom_variables(a)})
    s = from_positive_atoms(pos, names)
    if s.empty:
        return None
    kept: list[Atom] = []
    for a in dict.fromkeys(neg):
        t = from_positive_atoms([a], names)
        both = intersect(s, t)
        if both == s:
            return None
        if not both.empty:
            kept.append(a)
    out = [Literal(a) for a in atoms_of(s, names)]
    out += [Literal(a, False) for a in kept]
    return tuple(sorted(out, key=_lit_key))


def _normalize_dnf(conjuncts: Iterable[Iterable[Literal]]) -> QFFormula:
    seen = {}
    for c in conjuncts:
        sc = simplify_conjunct(c)
        if sc is None:
            continue
        if not sc:
            return QF_TRUE
        seen.setdefault(sc, None)
    return QFFormula(tuple(sorted(seen, key=lambda c: [_lit_key(l) for l in c])))


def qf_or(a: QFFormula, b: QFFormula) -> QFFormula:
    return _normalize_dnf(a.disjuncts + b.disjuncts)


def qf_and(a: QFFormula, b: QFFormula) -> QFFormula:
    return _normalize_dnf(ca + cb for ca in a.disjuncts for cb in b.disjuncts)


def qf_not(a: QFFormula) -> QFFormula:
    """DNF of the negation, distributing clause by clause with pruning."""
    acc = QF_TRUE
    for c in a.disjuncts:
        clause = _normalize_dnf(((l.negate(),) for l in c))
        acc = qf_and(acc, clause)
        if acc.is_false:
            break
    return acc


def literal_qf(lit: Literal) -> QFFormula:
    return _normalize_dnf([(lit,)])


# ---------------------------------------------------------------------------
# DNF


def to_dnf(phi: Formula) -> QFFormula:
    """Equivalent DNF of a quantifier-free formula over normalized literals."""
    if isinstance(phi, Bool):
        return QF_TRUE if phi.value else QF_FALSE
    if isinstance(phi, Eq):
        return literal_qf(Literal(normalize_atom(phi.lhs, phi.rhs)))
    if isinstance(phi, Not):
        return qf_not(to_dnf(phi.body))
    if isinstance(phi, And):
        acc = QF_TRUE
        for p in phi.parts:
            acc = qf_and(acc, to_dnf(p))
        return acc
    if isinstance(phi, Or):
        acc = QF_FALSE
        for p in phi.parts:
            acc = qf_or(acc, to_dnf(p))
        return acc
    raise ValueError("to_dnf needs a quantifier-free formula")


# ---------------------------------------------------------------------------
# elimination


def _rewrite(lit: Literal, y: str, by: Term, lift: int) -> Literal:
    """Substitute ``y := by`` after applying ``f^lift`` to both sides."""
    lhs, rhs = atom_terms(lit.atom)
    sides = []
    for t in (lhs, rhs):
        if isinstance(t.base, Var) and t.base.name == y:
            sides.append(by.apply(t.shift))
        else:
            sides.append(t.apply(lift))
    return Literal(normalize_atom(*sides), lit.positive)


def _eliminate_in_conjunct(y: str, lits: Sequence[Literal], modulus: int) -> list[list[Literal]]:
    mentions = [l for l in lits if y in l.variables()]
    others = [l for l in lits if y not in l.variables()]
    if not mentions:
        return [list(lits)]
    # (i) y is pinned or sits at a nonnegative level above another term
    for lit in mentions:
        if not lit.positive:
            continue
        a = lit.atom
        by = None
        if isinstance(a, Pin):
            by = atom_terms(a)[1]
        elif isinstance(a, Link) and a.hi == y:
            by = Term(a.shift, Var(a.lo))
        elif isinstance(a, Link) and a.shift == 0:
            by = Term(0, Var(a.hi))
        if by is not None:
            rest = [_rewrite(l, y, by, 0) for l in mentions if l is not lit]
            return [others + rest]
    # (ii) z = f^k(y), k >= 1: y is the k-th preimage of z
    for lit in mentions:
        a = lit.atom
        if lit.positive and isinstance(a, Link) and a.lo == y:
            z, k = a.hi, a.shift
            rest = [_rewrite(l, y, Term(0, Var(z)), k) for l in mentions if l is not lit]
            guard = [
                Literal(Pin(z, constant(i, j)), False) for i in range(1, modulus + 1) for j in range(k)
            ]
            return [others + rest + guard]
    # (iii) only disequalities mention y
    return [others]


def exists_qf(y: str, body: QFFormula, modulus: int) -> QFFormula:
    out = []
    for c in body.disjuncts:
        out.extend(_eliminate_in_conjunct(y, c, modulus))
    return _normalize_dnf(out)


def eliminate(phi: Formula, modulus: int) -> QFFormula:
    """Quantifier-free DNF equivalent to ``phi`` in every model."""
    if isinstance(phi, (Bool, Eq)):
        return to_dnf(phi)
    if isinstance(phi, Not):
        return qf_not(eliminate(phi.body, modulus))
    if isinstance(phi, And):
        acc = QF_TRUE
        for p in phi.parts:
            acc = qf_and(acc, eliminate(p, modulus))
            if acc.is_false:
                break
        return acc
    if isinstance(phi, Or):
        acc = QF_FALSE
        for p in phi.parts:
            acc = qf_or(acc, eliminate(p, modulus))
        return acc
    if isinstance(phi, Exists):
        return exists_qf(phi.var, eliminate(phi.body, modulus), modulus)
    if isinstance(phi, Forall):
        return qf_not(exists_qf(phi.var, qf_not(eliminate(phi.body, modulus)), modulus))
    raise TypeError(f"not a formula: {phi!r}")


def qf_literals(qf: QFFormula) -> list[Literal]:
    return [l for c in qf.disjuncts for l in c]


__all__ = [
    "Literal",
    "QFFormula",
    "QF_FALSE",
    "QF_TRUE",
    "eliminate",
    "exists_qf",
    "qf_and",
    "qf_not",
    "qf_or",
    "simplify_conjunct",
    "to_dnf",
]
