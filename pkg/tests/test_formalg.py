import random

import pytest
from hypothesis import given, strategies as st

from varbic.fields import SpacetimeField, StrictHorizontal, StrictVertical, diffeo_action, evolutionary_part
from varbic.formalg import (Form, euler_operator, horizontal_differential, interior_product, lie_derivative,
                            total_differential, vertical_differential, wedge)
from varbic.jetscalar import metric_ring
from varbic.randgen import random_form

seeds = st.integers(0, 2**32)
degrees = st.tuples(st.integers(0, 3), st.integers(0, 3))


def _form(ring, seed, p, q):
    return random_form(ring, random.Random(seed), p, min(q, ring.n), nterms=2, max_order=2)


def test_dx_antisymmetry(ring2):
    assert Form.dx(ring2, 2, 1) == -Form.dx(ring2, 1, 2)
    assert Form.dx(ring2, 1, 1).is_zero()


def test_wedge_moves_vertical_first(ring2):
    y = ring2.fibre_coord((1, 1))
    dx = Form.dx(ring2, 1)
    dy = Form.delta(ring2, y)
    assert wedge(dx, dy) == -wedge(dy, dx)
    assert wedge(dx, dy).bidegree() == (1, 1)


def test_vertical_differential_of_coordinate(ring2):
    y = ring2.fibre_coord((1, 2), "1")
    assert vertical_differential(Form.scalar(ring2.coord(y))) == Form.delta(ring2, y)


def test_horizontal_differential_of_coordinate(ring2):
    f = ring2.g(1, 1)
    expected = Form.scalar(ring2.g(1, 1, "1")) ^ Form.dx(ring2, 1)
    expected = expected + (Form.scalar(ring2.g(1, 1, "2")) ^ Form.dx(ring2, 2))
    assert horizontal_differential(Form.scalar(f)) == expected


def test_euler_operator_fixes_zero_order_source(ring2):
    vol = Form.dx(ring2, 1, 2)
    src = wedge(Form.delta(ring2, ring2.fibre_coord((1, 1))) * ring2.g(1, 2), vol)
    assert euler_operator(src) == src


def test_euler_operator_rejects_wrong_degree(ring2):
    with pytest.raises(ValueError):
        euler_operator(Form.delta(ring2, ring2.fibre_coord((1, 1))))


@given(seeds, degrees)
def test_bicomplex_axioms(seed, deg):
    ring = metric_ring(2)
    a = _form(ring, seed, *deg)
    assert vertical_differential(vertical_differential(a)).is_zero()
    assert horizontal_differential(horizontal_differential(a)).is_zero()
    assert (vertical_differential(horizontal_differential(a))
            + horizontal_differential(vertical_differential(a))).is_zero()
    assert total_differential(total_differential(a)).is_zero()


@given(seeds, degrees, degrees)
def test_wedge_graded_commutative(seed, d1, d2):
    ring = metric_ring(3)
    a = _form(ring, seed, *d1)
    b = _form(ring, seed + 1, *d2)
    sign = -1 if ((d1[0] + min(d1[1], 3)) * (d2[0] + min(d2[1], 3))) % 2 else 1
    assert wedge(a, b) == wedge(b, a) * sign


@given(seeds, degrees, degrees)
def test_differentials_are_derivations(seed, d1, d2):
    ring = metric_ring(2)
    a = _form(ring, seed, *d1)
    b = _form(ring, seed + 7, *d2)
    sign = -1 if (d1[0] + min(d1[1], 2)) % 2 else 1
    for op in (vertical_differential, horizontal_differential):
        assert op(wedge(a, b)) == wedge(op(a), b) + wedge(a, op(b)) * sign


@given(seeds, degrees)
def test_interior_product_squares_to_zero(seed, deg):
    ring = metric_ring(2)
    a = _form(ring, seed, *deg)
    X = diffeo_action(SpacetimeField.formal(ring, "v"))
    assert interior_product(X, interior_product(X, a)).is_zero()


@given(seeds, degrees)
def test_strict_lie_derivative_shortcuts(seed, deg):
    ring = metric_ring(2)
    a = _form(ring, seed, *deg)
    v = SpacetimeField.formal(ring, "v")
    for X in (StrictVertical(evolutionary_part(v)), StrictHorizontal(v)):
        general = interior_product(X, total_differential(a)) + total_differential(interior_product(X, a))
        assert lie_derivative(X, a) == general


@given(seeds, degrees)
def test_lie_derivative_commutes_with_d(seed, deg):
    ring = metric_ring(2)
    a = _form(ring, seed, *deg)
    X = diffeo_action(SpacetimeField.formal(ring, "v"))
    assert lie_derivative(X, total_differential(a)) == total_differential(lie_derivative(X, a))


@given(seeds)
def test_euler_operator_kills_exact_forms(seed):
    ring = metric_ring(2)
    beta = _form(ring, seed, 1, 1)
    assert euler_operator(horizontal_differential(beta)).is_zero()


def test_to_text_truncates(ring3):
    big = Form.sum([Form.scalar(ring3.g(1, 1, "1") * k) ^ Form.delta(ring3, ring3.fibre_coord((a, b)))
                    for k, (a, b) in enumerate(ring3.schema.components, start=1)], ring3)
    text = big.to_text(max_terms=2)
    assert "more monomials" in text
