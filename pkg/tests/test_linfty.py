from fractions import Fraction

import pytest

from varbic.formalg import Form
from varbic.linfty import (BracketClosureError, LabelAlgebra, MomentumMap, ce_boundary_squared, chevalley_boundary,
                           general_bracket_expansion, l_bracket, two_bracket_display)
from varbic.fields import SpacetimeField


def test_two_term_boundary_sign(ring2):
    alg = LabelAlgebra.formal(ring2, ["a", "b"])
    assert chevalley_boundary(alg, ("a", "b")) == {("[a,b]",): Fraction(-1)}


def test_three_term_boundary(ring2):
    alg = LabelAlgebra.formal(ring2, ["a", "b", "c"])
    out = chevalley_boundary(alg, ("a", "b", "c"))
    # δ(a∧b∧c) = -([a,b]∧c - [a,c]∧b + [b,c]∧a) in registration order
    assert out[("c", "[a,b]")] == Fraction(1)
    assert out[("b", "[a,c]")] == Fraction(-1)
    assert out[("a", "[b,c]")] == Fraction(1)


def test_affine_algebra_closes(ring3):
    alg = LabelAlgebra.affine(ring3)
    for w in alg.words(3):
        assert not ce_boundary_squared(alg, w)
    assert alg.bracket("x1d2", "x2d1") == {"x1d1": Fraction(1), "x2d2": Fraction(-1)}


def test_unclosed_bracket_is_rejected(ring2):
    alg = LabelAlgebra.affine(ring2)
    quad = SpacetimeField(ring2, [ring2.x(1) * ring2.x(1), ring2.zero], "q")
    alg.register("q", quad)
    with pytest.raises(BracketClosureError):
        alg.bracket("q", "x2d1")


@pytest.mark.parametrize("kind", ["coordinate", "affine", "formal"])
def test_morphism_identity_2d(theory2, kind):
    alg = {"coordinate": LabelAlgebra.coordinate, "affine": LabelAlgebra.affine}.get(kind)
    alg = alg(theory2.ring) if alg else LabelAlgebra.formal(theory2.ring, ["u", "v", "w"])
    M = MomentumMap(theory2, alg)
    for k in (1, 2):
        for w in alg.words(k):
            assert M.morphism_residual(w).is_zero(), w


def test_mu_beyond_dimension_is_zero(theory2):
    M = MomentumMap(theory2, LabelAlgebra.formal(theory2.ring, ["u", "v", "w"]))
    assert M.mu(("u", "v", "w")).is_zero()


def test_mu_bracket_and_splits(theory2):
    M = MomentumMap(theory2, LabelAlgebra.formal(theory2.ring, ["v", "w"]))
    assert M.mu_bracket_residual("v", "w").is_zero()
    assert M.mu_split(("v",)) == M.mu(("v",))
    assert M.mu_split(("v", "w")) == M.mu(("v", "w"))
    assert M.hamiltonian_residual("v").is_zero()
    assert M.nu_bracket_residual(("v", "w")).is_zero()


def test_printed_mu2_differs_only_in_lowest_degree(theory2):
    M = MomentumMap(theory2, LabelAlgebra.formal(theory2.ring, ["v", "w"]))
    derived = M.mu(("v", "w"))
    diff = M.mu2_printed("v", "w") - derived
    assert diff.bidegrees() == {(0, 0)}
    assert diff == derived.component(0, 0) * -2


def test_bracket_expansions(theory2):
    M = MomentumMap(theory2, LabelAlgebra.formal(theory2.ring, ["v", "w"]))
    X, Y = M.rho("v"), M.rho("w")
    l2 = l_bracket(theory2, [X, Y])
    assert general_bracket_expansion(theory2, [X, Y]) == l2
    assert two_bracket_display(theory2, X, Y, printed=False) == l2
    assert l_bracket(theory2, [Y, X]) == -l2


def test_l1_is_total_differential(theory2):
    M = MomentumMap(theory2, LabelAlgebra.formal(theory2.ring, ["v"]))
    mu = M.mu(("v",))
    assert l_bracket(theory2, [], [l_bracket(theory2, [], [mu])]).is_zero()
