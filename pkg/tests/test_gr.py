import pytest

from varbic.fields import SpacetimeField, diffeo_action
from varbic.formalg import Form, euler_operator, horizontal_differential, interior_product, vertical_differential
from varbic.geometry import geometry
from varbic.gr import (einstein_checks, euler_self_check, noether_checks, noether_current,
                       noether_current_closed_form, verify_hamiltonian_pair, verify_lepage_invariance)


@pytest.fixture(params=[2, 3])
def theory(request, theory2, theory3):
    return {2: theory2, 3: theory3}[request.param]


def test_split_identity(theory):
    assert theory.split_residual().is_zero()
    assert theory.L.bidegrees() == {(0, theory.ring.n)}
    assert theory.gamma.bidegrees() == {(1, theory.ring.n - 1)}


def test_euler_self_check(theory):
    assert euler_self_check(theory).ok


def test_lepage_invariance(theory):
    v = SpacetimeField.formal(theory.ring, "v")
    for check in verify_lepage_invariance(theory, v):
        assert check.ok, check.name


def test_noether(theory):
    v = SpacetimeField.formal(theory.ring, "v")
    for check in noether_checks(theory, v):
        assert check.ok, check.name


def test_noether_current_is_exact_in_2d(theory2):
    v = SpacetimeField.formal(theory2.ring, "v")
    bulk, exact = noether_current_closed_form(theory2, v)
    assert bulk.is_zero()
    assert noether_current(theory2, v) == exact


def test_einstein_divergence(theory):
    assert all(c.ok for c in einstein_checks(theory))


def test_omega_closed(theory):
    from varbic.formalg import total_differential
    assert total_differential(theory.omega).is_zero()
    assert total_differential(theory.lepage) == theory.omega


def test_hamiltonian_pair(theory2):
    v = SpacetimeField.formal(theory2.ring, "v")
    X = diffeo_action(v)
    chk = verify_hamiltonian_pair(theory2, X, interior_product(X, theory2.lepage))
    assert chk.ok
    assert chk.preserves_omega.is_zero()
    assert chk.current.is_zero()


def test_hamiltonian_pair_rejects_perturbation(theory2):
    ring = theory2.ring
    v = SpacetimeField.formal(ring, "v")
    X = diffeo_action(v)
    junk = Form.scalar(ring.g(1, 1) * ring.x(2)) ^ Form.dx(ring, 1)
    assert not verify_hamiltonian_pair(theory2, X, interior_product(X, theory2.lepage) + junk).ok


def test_hamiltonian_pair_degree_check(theory2):
    X = diffeo_action(SpacetimeField.formal(theory2.ring, "v"))
    with pytest.raises(ValueError):
        verify_hamiltonian_pair(theory2, X, theory2.L)


def test_coordinate_translation_current(theory3):
    # j_{∂_1} = -ι_{∂̂_1} L - ι_ξ γ satisfies the conservation law with ξ = -g_{ab,1}
    v = SpacetimeField.coordinate(theory3.ring, 1)
    for check in noether_checks(theory3, v):
        assert check.ok, check.name
