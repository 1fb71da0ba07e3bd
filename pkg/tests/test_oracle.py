import io
import random
from fractions import Fraction

import pytest

from k0calc.core_sets import simple_set
from k0calc.corpus import random_cell, random_simple
from k0calc.oracle import (
    OracleCapExceeded,
    OracleError,
    StandardModel,
    cell_mask,
    count,
    counts,
    cross_check_class,
    enumerate_cell,
    enumerate_simple,
    eval_formula,
    evaluate_box,
    export_counts_csv,
    fit_counting_polynomial,
    interpolate,
    simple_mask,
)
from k0calc.qe import eliminate
from k0calc.syntax import constant, parse


def p(text, names, n):
    return parse(text, names, n)


def fit(text, names, n):
    return fit_counting_polynomial(eliminate(p(text, names, n), n), names, n)


def test_axioms_hold_in_the_standard_model():
    for n in range(1, 6):
        m = StandardModel(n)
        assert m.check_axioms()
        assert m.f(2, 3) == 2 + 3 * n and m.constant(1) == 0


def test_eval_examples():
    for n in (1, 2, 3):
        assert eval_formula(p("f(x) = y", ["x", "y"], n), (2, 2 + n), ["x", "y"], n)
    phi = p("E y. f(y) = x", ["x"], 2)
    assert not eval_formula(phi, (0,), ["x"], 2)
    assert eval_formula(phi, (5,), ["x"], 2)


def test_eval_rejects_bad_input():
    phi = p("E y. f(y) = x", ["x"], 2)
    with pytest.raises(OracleError):
        eval_formula(phi, (5,), ["x"], 2, witness_bound=1)
    with pytest.raises(OracleError):
        eval_formula(p("x = g:a", ["x"], 2), (0,), ["x"], 2)
    with pytest.raises(OracleError):
        eval_formula(phi, (-1,), ["x"], 2)


def test_count_examples():
    assert count(p("y = f(x)", ["x", "y"], 3), ["x", "y"], 9, 3) == 6
    assert counts(p("true", ["x"], 2), ["x"], [1, 5, 17], 2) == {1: 1, 5: 5, 17: 17}
    assert count(p("x != c1", ["x"], 2), ["x"], 10, 2) == 9
    with pytest.raises(OracleError):
        count(p("x != g:a", ["x"], 2), ["x"], 10, 2)


def test_caps():
    with pytest.raises(OracleCapExceeded):
        count(p("true", ["x"], 2), ["x"], 129, 2)
    names = ["x", "y", "z", "u", "v"]
    with pytest.raises(OracleCapExceeded):
        count(p("true", names, 2), names, 3, 2)


def test_fit_examples():
    g = fit("y = f(x)", ["x", "y"], 3)
    assert g.coeffs == (-3, 1) and g.degree == 1 and str(g) == "B - 3"
    assert fit("true", ["x", "y"], 2).coeffs == (0, 0, 1)
    assert fit("x != c1 & x != f(c1)", ["x"], 2).coeffs == (-2, 1)
    assert fit("x = c1 & x = c2", ["x"], 2).degree == float("-inf")


def test_fitted_polynomial_matches_counts_past_threshold():
    g = fit("E u. f(u) = x & u != y", ["x", "y"], 2)
    later = counts(eliminate(p("E u. f(u) = x & u != y", ["x", "y"], 2), 2), ["x", "y"], range(g.threshold, 40), 2)
    assert all(g(b) == c for b, c in later.items())


def test_interpolate():
    assert interpolate([(0, 1), (1, 2), (2, 5)]) == [Fraction(1), Fraction(0), Fraction(1)]


def test_cross_check_examples():
    r = cross_check_class(p("true", ["x"], 3), ["x"], 3)
    assert r.passed and str(r.class_poly) == "X" and r.counting.coeffs == (0, 1)
    r = cross_check_class(p("x != c1", ["x"], 2), ["x"], 2)
    assert r.passed and str(r.class_poly) == "X + 1" and r.counting.coeffs == (-1, 1)
    r = cross_check_class(p("E y. f(y) = x", ["x"], 2), ["x"], 2)
    assert r.passed and str(r.class_poly) == "X" and r.counting.coeffs == (-2, 1)
    assert r.to_json()["status"] == "pass"


def test_masks_match_membership_and_enumeration():
    rng = random.Random(8)
    for _ in range(40):
        n, m = rng.randint(1, 3), rng.randint(1, 3)
        s = random_simple(rng, n, m)
        box = 2 * m + 4
        inside = lambda vs: {v for v in vs if max(v) < box}  # noqa: E731
        assert inside(enumerate_simple(s, box, m)) == {tuple(map(int, v)) for v in zip(*simple_mask(s, box, m).nonzero())}
        c = random_cell(rng, n, m)
        cm = cell_mask(c, box, m)
        assert inside(enumerate_cell(c, box, m)) == {tuple(map(int, v)) for v in zip(*cm.nonzero())}


def test_simple_mask_example():
    s = simple_set(2, [(0, 1, 1)], [(0, constant(2))])
    assert list(enumerate_simple(s, 10, 3)) == [(1, 4)]


def test_csv_export():
    buf = io.StringIO()
    export_counts_csv([(3, 2), (4, 3)], buf)
    assert buf.getvalue().splitlines() == ["B,count", "3,2", "4,3"]


def test_truth_table_shape():
    t = evaluate_box(p("x = c1 | y = c2", ["x", "y"], 2), ["x", "y"], (3, 4), 2)
    assert t.shape == (3, 4) and int(t.sum()) == 3 + 4 - 1
