import random

import pytest

from varbic.fields import SpacetimeField, diffeo_action
from varbic.formalg import Form, lie_derivative
from varbic.geometry import (CO, CONTRA, FormFamily, check_covariance, christoffel_family, covariance_residual,
                             covariant_derivative, delta_metric_family, divergence_2_sides, geometry,
                             inverse_metric_family, metric_family, verify_divergence_1, verify_divergence_2)
from varbic.jetscalar import metric_ring
from varbic.randgen import random_family


@pytest.mark.parametrize("n", [2, 3])
def test_covariance_ledger(n):
    ring = metric_ring(n)
    v = SpacetimeField.formal(ring, "v")
    assert check_covariance(metric_family(ring), [v]).ok
    assert check_covariance(delta_metric_family(ring), [v]).ok
    assert check_covariance(inverse_metric_family(ring), [v]).ok
    assert lie_derivative(diffeo_action(v), geometry(ring).vol()).is_zero()


@pytest.mark.parametrize("n", [2, 3])
def test_christoffel_residual_is_second_derivative(n):
    ring = metric_ring(n)
    v = SpacetimeField.formal(ring, "v")
    res = covariance_residual(christoffel_family(ring), v)
    for a, b, c in christoffel_family(ring).indices():
        expected = -v.derivative(a, b).total_derivative(c)
        assert res[(a, b, c)].coefficient() == expected


def test_nabla_of_covariant_is_covariant(ring2):
    v = SpacetimeField.formal(ring2, "v")
    assert check_covariance(covariant_derivative(delta_metric_family(ring2)), [v]).ok
    # ∇g = 0
    assert covariant_derivative(metric_family(ring2)).is_zero()


def test_contravariant_family_detects_wrong_variance(ring2):
    v = SpacetimeField.formal(ring2, "v")
    wrong = FormFamily(ring2, (CONTRA, CONTRA), metric_family(ring2).entries)
    assert not check_covariance(wrong, [v]).ok


def test_einstein_2d_and_divergence(ring2, ring3):
    g2 = geometry(ring2)
    assert all(g2.einstein_upper(a, b).is_zero() for a in (1, 2) for b in (1, 2))
    g3 = geometry(ring3)
    assert all(g3.einstein_divergence(b).is_zero() for b in (1, 2, 3))
    assert not g3.scalar_curvature().is_zero()


@pytest.mark.parametrize("n", [2, 3])
def test_divergence_formulas_on_random_families(n):
    ring = metric_ring(n)
    rng = random.Random(n)
    for p in range(3):
        assert verify_divergence_1(random_family(ring, rng, 1, p, 0))
        for q in (0, 1):
            assert verify_divergence_2(random_family(ring, rng, 2, p, q, antisymmetric=True))


def test_printed_bivector_sign_fails_for_one_forms(ring2):
    rng = random.Random(3)
    fam = random_family(ring2, rng, 2, 0, 1, antisymmetric=True)
    lhs, rhs = divergence_2_sides(fam, sign_exponent="p")
    assert not (lhs - rhs).is_zero()
    assert (lhs + rhs).is_zero()


def test_divergence_bivector_with_dx(ring2):
    # χ^{12} = -χ^{21} = dx^1, a (0,1) family
    dx1 = Form.dx(ring2, 1)
    fam = FormFamily(ring2, (CONTRA, CONTRA), {(1, 1): Form.zero(ring2), (2, 2): Form.zero(ring2),
                                               (1, 2): dx1, (2, 1): -dx1})
    assert verify_divergence_2(fam)


def test_divergence_rejects_bad_input(ring2):
    with pytest.raises(ValueError):
        verify_divergence_1(metric_family(ring2))
    rng = random.Random(0)
    sym = random_family(ring2, rng, 2, 0, 0)
    with pytest.raises(ValueError):
        verify_divergence_2(sym)
