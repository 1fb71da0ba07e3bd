import itertools
import random

import numpy as np
import pytest

from k0calc.core_sets import full_space, intersect, simple_set
from k0calc.corpus import random_cell
from k0calc.decompose import (
    BasicSet,
    Cell,
    Decomposition,
    Layer,
    cell_subtract,
    disjointify,
    class_preimage_cells,
    complement,
    decompose_formula,
    difference,
    from_simple,
    intersection,
    make_cell,
    to_basic,
    union,
)
from k0calc.k0 import IntPoly, class_of
from k0calc.oracle import cell_mask, count, simple_mask
from k0calc.qe import eliminate
from k0calc.syntax import constant, generic, parse


def dec(text, names, n):
    return decompose_formula(parse(text, names, n), names, n)


def mask(d, box, n):
    out = np.zeros((box,) * d.arity, dtype=bool)
    for c in d.cells:
        m = cell_mask(c, box, n)
        assert not (out & m).any()
        out |= m
    return out


def test_one_point_removed():
    d = dec("x != c1", ["x"], 2)
    assert d.cells == [Cell(full_space(1), (simple_set(1, [], [(0, constant(1))]),))]


def test_disjoint_lines_need_no_subtraction():
    d = dec("y = f(x) | y = f^2(x)", ["x", "y"], 2)
    assert len(d.cells) == 2
    assert all(not c.negatives for c in d.cells)
    assert d.certificates()[0][2] == {"kind": "empty-intersection"}


def test_absorbed_cell():
    d = dec("true | y = f(x)", ["x", "y"], 3)
    assert d.cells == [Cell(full_space(2))]
    assert count(parse("true | y = f(x)", ["x", "y"], 3), ["x", "y"], 10, 3) == 100


def test_overlapping_cells_are_disjointified():
    d = dec("x = c1 | x != c2", ["x"], 2)
    assert d.is_certified_disjoint()
    assert np.array_equal(mask(d, 10, 2), np.arange(10) != 1)
    for trace in d.traces:
        assert all(b < a for a, b in zip(trace, trace[1:]))


def test_cell_subtract_is_a_disjoint_difference():
    rng = random.Random(4)
    for _ in range(150):
        n, m = rng.randint(1, 3), rng.randint(1, 3)
        a, e = random_cell(rng, n, m), random_cell(rng, n, m)
        pieces = cell_subtract(a, e)
        d = Decomposition(n, pieces)
        assert d.is_certified_disjoint()
        want = cell_mask(a, 3 * m + 3, m) & ~cell_mask(e, 3 * m + 3, m)
        assert np.array_equal(mask(d, 3 * m + 3, m), want)


def test_boolean_operations():
    a = dec("x != c1", ["x", "y"], 2)
    b = dec("y = f(x)", ["x", "y"], 2)
    ma, mb = mask(a, 8, 2), mask(b, 8, 2)
    assert np.array_equal(mask(union(a, b), 8, 2), ma | mb)
    assert np.array_equal(mask(intersection(a, b), 8, 2), ma & mb)
    assert np.array_equal(mask(difference(a, b), 8, 2), ma & ~mb)
    assert np.array_equal(mask(complement(a), 8, 2), ~ma)
    with pytest.raises(ValueError):
        union(a, from_simple(full_space(1)))


def test_preimage_cells_sign_patterns():
    b = full_space(2)
    b1 = simple_set(2, [], [(0, constant(1))])
    b2 = simple_set(2, [], [(1, constant(2))])
    (_, t0), = class_preimage_cells(Decomposition(2, [Cell(b)]))
    assert t0 == [(1, b)]
    (_, t1), = class_preimage_cells(Decomposition(2, [make_cell(b, [b1])]))
    assert t1 == [(1, b), (-1, b1)]
    cell = make_cell(b, [b1, b2])
    (_, t2), = class_preimage_cells(Decomposition(2, [cell]))
    assert [s for s, _ in t2] == [1, -1, -1, 1]
    assert t2[3][1] == intersect(*cell.negatives)
    box = 9
    signed = sum(s * int(simple_mask(t, box, 2).sum()) for s, t in t2)
    assert signed == int(cell_mask(cell, box, 2).sum())


@pytest.mark.parametrize(
    "text, names, n, poly",
    [
        ("x != c1", ["x"], 2, (1, 1)),
        ("true", ["x", "y"], 2, (0, 0, 1)),
        ("x != c1 & x != c2", ["x"], 3, (1, 1)),
    ],
)
def test_to_basic(text, names, n, poly):
    d = dec(text, names, n)
    p, nset, cert = to_basic(d, n)
    assert p.polynomial() == IntPoly(poly)
    assert nset.layers == ()
    assert cert.holds
    assert p.arity >= d.arity + 1


def test_to_basic_unreduced_keeps_the_integer_class():
    d = dec("x != c1 & x != c2", ["x"], 3)
    p, nset, cert = to_basic(d, 3, reduce=False)
    assert p.polynomial() == IntPoly((0, 1))
    assert nset.polynomial() == IntPoly((2,))
    assert cert.holds
    fibers = [q for b in (p, nset) for l in b.layers for q in l.fiber]
    assert len(set(fibers)) == len(fibers)


def test_basic_set_validation_and_json():
    a, b = generic("a"), generic("b")
    s = BasicSet(3, (Layer(0, (a,), (a, a)), Layer(2, (b,), ())))
    assert s.polynomial() == IntPoly((1, 0, 1))
    assert s.dimension == 2
    assert BasicSet.from_json(s.to_json()) == s
    assert class_of(s.to_decomposition(), 5) == IntPoly((1, 0, 1)).reduce(5)
    with pytest.raises(ValueError):
        BasicSet(2, (Layer(0, (a,), ()),))
    with pytest.raises(ValueError):
        BasicSet(1, (Layer(0, (a,), ()), Layer(0, (a,), ())))
    with pytest.raises(ValueError):
        BasicSet(1, (Layer(0, (), ()),))


def test_decomposition_json_round_trip():
    d = dec("x != c1 | y = f(x) & y != c2", ["x", "y"], 2)
    assert Decomposition.from_json(d.to_json()) == d


def test_membership_matches_formula():
    for text in ["x != c1 | y = f(x) & y != c2", "~(x = y) & f(x) != y"]:
        d = dec(text, ["x", "y"], 2)
        for v in itertools.product(range(7), repeat=2):
            assert d.contains(v, 2) == bool(mask(d, 7, 2)[v])


def test_component_measure_is_recorded_per_step():
    qf_text = "x = c1 | x != c2 | x = f(c1)"
    d = decompose_formula(parse(qf_text, ["x"], 2), ["x"], 2)
    assert d.s_traces == []
    d = disjointify(eliminate(parse(qf_text, ["x"], 2), 2), ["x"], record_s_measure=True)
    assert [len(t) for t in d.s_traces] == [len(t) for t in d.traces]
    # exact rewriting leaves the closure of the covered set unchanged
    assert any(len(t) > 2 for t in d.s_traces)
    assert all(len(set(t)) == 1 for t in d.s_traces)
