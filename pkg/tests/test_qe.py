import random

import numpy as np
import pytest

from k0calc.corpus import random_formula
from k0calc.oracle import evaluate_box
from k0calc.qe import QF_FALSE, QF_TRUE, Literal, eliminate, qf_not, simplify_conjunct, to_dnf
from k0calc.syntax import Link, Not, Pin, constant, generic, parse, quantifier_depth


def qe(text, names, n):
    return eliminate(parse(text, names, n), n)


def literal_set(qf):
    return {frozenset(c) for c in qf.disjuncts}


def test_preimage_of_f_avoids_constants():
    for n in (1, 2, 3):
        qf = qe("E y. f(y) = x", ["x"], n)
        expected = {Literal(Pin("x", constant(i)), False) for i in range(1, n + 1)}
        assert literal_set(qf) == {frozenset(expected)}


def test_finite_exclusions_are_satisfiable():
    assert qe("E y. y != x & y != c1", ["x"], 2).is_true


def test_second_preimage():
    qf = qe("E y. f^2(y) = x", ["x"], 2)
    pts = [constant(1), constant(2), constant(1, 1), constant(2, 1)]
    assert literal_set(qf) == {frozenset(Literal(Pin("x", p), False) for p in pts)}
    table = evaluate_box(qf.to_formula(), ["x"], 12, 2)
    assert list(np.flatnonzero(~table)) == [0, 1, 2, 3]


def test_universal_and_sentences():
    assert qe("A y. y = x", ["x"], 2).is_false
    assert qe("A x. E y. f(y) = f(x)", [], 3).is_true
    assert qe("E x. A y. f(y) != x", [], 1).is_true
    assert qe("E x. f(x) = c1", [], 2).is_false


def test_to_dnf_de_morgan():
    a, b = "x = c1", "y = f(x)"
    qf = to_dnf(parse(f"~({a} & {b})", ["x", "y"], 2))
    assert literal_set(qf) == {
        frozenset([Literal(Pin("x", constant(1)), False)]),
        frozenset([Literal(Pin("y", constant(1, 1)), False)]),
    }


def test_contradictory_conjunct_is_dropped():
    qf = to_dnf(parse("y = f(x) & y = f^2(x)", ["x", "y"], 2))
    assert qf == QF_FALSE


def test_dnf_input_is_only_normalized():
    qf = to_dnf(parse("f^2(x) = f(y) | x != c2", ["x", "y"], 2))
    assert literal_set(qf) == {
        frozenset([Literal(Link("x", 1, "y"))]),
        frozenset([Literal(Pin("x", constant(2)), False)]),
    }


def test_simplify_conjunct():
    lx = Literal(Pin("x", constant(1)))
    assert simplify_conjunct([lx, lx.negate()]) is None
    # a negative disjoint from the positives says nothing
    assert simplify_conjunct([lx, Literal(Pin("x", constant(2)), False)]) == (lx,)
    assert QF_TRUE.is_true and qf_not(QF_TRUE) == QF_FALSE


def test_elimination_is_idempotent_and_respects_negation():
    rng = random.Random(11)
    for _ in range(80):
        n = rng.randint(1, 3)
        item = random_formula(rng, n)
        qf = eliminate(item.formula, n)
        assert quantifier_depth(qf.to_formula()) == 0
        assert eliminate(qf.to_formula(), n) == qf
        b = 2 * n + 2
        table = evaluate_box(qf.to_formula(), item.variables, b, n)
        double = eliminate(Not(Not(item.formula)), n).to_formula()
        assert np.array_equal(evaluate_box(double, item.variables, b, n), table)
        neg = eliminate(Not(item.formula), n).to_formula()
        assert np.array_equal(evaluate_box(neg, item.variables, b, n), ~table)
        assert np.array_equal(evaluate_box(qf_not(qf).to_formula(), item.variables, b, n), ~table)


def test_matches_oracle_on_a_box():
    rng = random.Random(12)
    for _ in range(60):
        n = rng.randint(1, 3)
        item = random_formula(rng, n)
        qf = eliminate(item.formula, n)
        b = 3 * n + 3
        lhs = evaluate_box(item.formula, item.variables, b, n)
        rhs = evaluate_box(qf.to_formula(), item.variables, b, n)
        assert np.array_equal(lhs, rhs), str(item.formula)


def test_generic_parameters_rename_symmetrically():
    phi = parse("E y. f(y) = x & y != g:a", ["x"], 2)
    psi = parse("E y. f(y) = x & y != g:b", ["x"], 2)
    a = str(eliminate(phi, 2))
    b = str(eliminate(psi, 2))
    assert a.replace("g:a", "g:b") == b
    assert "g:a" in a


def test_generic_parameter_preimage():
    qf = qe("E y. f(y) = x", ["x"], 1)
    assert Literal(Pin("x", generic("a")), False) not in qf.disjuncts[0]
    with pytest.raises(Exception):
        parse("E y. f(y) = x", ["x"], 0)
