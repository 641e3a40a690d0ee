import random

import pytest
from hypothesis import given, strategies as st

from varbic.geometry import geometry
from varbic.jetscalar import metric_ring, particle_ring
from varbic.oracle import (evaluate, evaluate_reference, forms_agree, probabilistic_is_zero, sample_jet_point,
                           _is_square)
from varbic.randgen import random_form, random_scalar

seeds = st.integers(0, 2**63 - 1)


def test_same_seed_same_point(ring3):
    p, q = sample_jet_point(ring3, 11), sample_jet_point(ring3, 11)
    y = ring3.fibre_coord((1, 3), "122")
    assert p.describe() == q.describe()
    assert p.value(y) == q.value(y)


def test_minkowski_mode(ring2):
    p = sample_jet_point(ring2, 0, forced="minkowski")
    assert p.det == -1
    assert evaluate(ring2.g(1, 1), p) == (-1, 0)
    assert evaluate(ring2.g(1, 1, "2"), p) == (0, 0)


def test_sampler_audit(ring3):
    for seed in range(1000):
        p = sample_jet_point(ring3, seed)
        assert p.det < 0
        assert not _is_square(-p.det)


def test_s_squared(ring2):
    p = sample_jet_point(ring2, 5)
    assert evaluate(ring2.s * ring2.s, p) == (-p.det, 0)
    assert evaluate(ring2.s, p) == (0, 1)


def test_inverse_identity_evaluates_to_zero(ring3):
    geo = geometry(ring3)
    f = sum((geo.ginv(1, b) * ring3.g(b, 2) for b in (1, 2, 3)), ring3.zero)
    assert probabilistic_is_zero(f).zero


def test_einstein_2d_is_zero_at_points(ring2):
    geo = geometry(ring2)
    for a in (1, 2):
        for b in (1, 2):
            assert probabilistic_is_zero(geo.einstein_upper(a, b)).zero


def test_nonzero_detected(ring2):
    verdict = probabilistic_is_zero(ring2.g(1, 1))
    assert not verdict.zero
    assert verdict.points_tested == 1
    assert verdict.first_failing_seed is not None


def test_formal_fields_are_concrete_polynomials(ring2):
    p = sample_jet_point(ring2, 3)
    v = ring2.vsym("v", 1)
    assert evaluate(v.total_derivative(1), p) == evaluate(ring2.vsym("v", 1, "1"), p)
    assert evaluate(ring2.vsym("v", 1, "1111"), p) == (0, 0)  # degree 3 polynomials


def test_particle_points():
    ring = particle_ring(2)
    p = sample_jet_point(ring, 1)
    assert p.det is None
    assert evaluate(ring.q(1) * ring.q(2), p)[1] == 0


def test_cap_mismatch(ring2):
    other = metric_ring(3)
    with pytest.raises(ValueError):
        evaluate(other.g(1, 1), sample_jet_point(ring2, 0))


@given(seeds, st.integers(0, 2**32))
def test_evaluation_is_a_homomorphism(point_seed, expr_seed):
    ring = metric_ring(2)
    rng = random.Random(expr_seed)
    f = random_scalar(ring, rng, max_order=2, nterms=3)
    g = random_scalar(ring, rng, max_order=2, nterms=3)
    p = sample_jet_point(ring, point_seed)
    (a1, b1), (a2, b2) = evaluate(f, p), evaluate(g, p)
    assert evaluate(f * g, p) == (a1 * a2 + b1 * b2 * p.s_squared(), a1 * b2 + a2 * b1)
    assert evaluate(f + g, p) == (a1 + a2, b1 + b2)


@given(seeds, st.integers(0, 2**32))
def test_flint_and_reference_evaluators_agree(point_seed, expr_seed):
    ring = metric_ring(3)
    f = random_scalar(ring, random.Random(expr_seed), max_order=2, nterms=4)
    p = sample_jet_point(ring, point_seed)
    assert evaluate(f, p) == evaluate_reference(f, p)


@given(st.integers(0, 2**32))
def test_forms_agree_matches_symbolic_equality(seed):
    ring = metric_ring(2)
    rng = random.Random(seed)
    a = random_form(ring, rng, 1, 1)
    b = random_form(ring, rng, 1, 1)
    assert forms_agree(a + b, b + a, npoints=5).zero
    assert forms_agree(a, a + b, npoints=5).zero == b.is_zero()
