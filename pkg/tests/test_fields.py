from varbic.fields import (SpacetimeField, StrictHorizontal, StrictVertical, apply_to_scalar, check_strict,
                           diffeo_action, evolutionary_part)
from varbic.formalg import Form, interior_product
from varbic.jetscalar import metric_ring


def test_strictness_classification():
    ring = metric_ring(2, jet_cap=3, vsym_cap=3)
    v = SpacetimeField.formal(ring, "v")
    assert check_strict(StrictVertical(evolutionary_part(v)), max_order=1) == "vertical"
    assert check_strict(StrictHorizontal(v), max_order=1) == "horizontal"
    assert check_strict(diffeo_action(v), max_order=1) == "neither"


def test_coordinate_field_bracket_vanishes(ring2):
    d1 = SpacetimeField.coordinate(ring2, 1)
    d2 = SpacetimeField.coordinate(ring2, 2)
    assert d1.bracket(d2).is_zero()


def test_affine_bracket(ring2):
    # [x^1 d_2, x^2 d_1] = x^1 d_1 - x^2 d_2
    a = SpacetimeField.affine(ring2, 1, 2)
    b = SpacetimeField.affine(ring2, 2, 1)
    expected = SpacetimeField(ring2, [ring2.x(1), -ring2.x(2)])
    assert a.bracket(b) == expected


def test_bracket_antisymmetric(ring2):
    v = SpacetimeField.formal(ring2, "v")
    w = SpacetimeField.formal(ring2, "w")
    assert (v.bracket(w) + w.bracket(v)).is_zero()


def test_evolutionary_part_of_translation(ring2):
    # ξ_{∂_1} g_ab = -g_{ab,1}
    xi = evolutionary_part(SpacetimeField.coordinate(ring2, 1))
    for a, b in ring2.schema.components:
        assert xi.get((a, b)) == -ring2.g(a, b, "1")


def test_rho_translation_kills_metric_jets(ring2):
    rho = diffeo_action(SpacetimeField.coordinate(ring2, 2))
    for C in ("", "1", "12"):
        assert apply_to_scalar(rho, ring2.g(1, 2, C)).is_zero()
    assert apply_to_scalar(rho, ring2.x(2)) == ring2.one


def test_prolongation_commutes_with_total_derivative(ring2):
    v = SpacetimeField.formal(ring2, "v")
    xi = StrictVertical(evolutionary_part(v))
    y = ring2.fibre_coord((1, 1), "1")
    base = ring2.fibre_coord((1, 1))
    assert xi.vertical_image(ring2, y) == xi.vertical_image(ring2, base).total_derivative(1)


def test_horizontal_contraction_of_dx(ring2):
    v = SpacetimeField.formal(ring2, "v")
    vhat = StrictHorizontal(v)
    assert interior_product(vhat, Form.dx(ring2, 2)).coefficient() == ring2.vsym("v", 2)
