import pytest

from varbic.formalg import Form, wedge
from varbic.mech import MechContext, build_mech_theory, mech_checks, time_translation_momentum


@pytest.mark.parametrize("m,potential", [(1, "0"), (1, "q1^2/2"), (2, "q1^4 - 3*q1*q2 + 1/3*q2^3"),
                                         (3, "q1*q2*q3 - 2*q3^2")])
def test_all_checks(m, potential):
    for check in mech_checks(MechContext.parse(m, potential)):
        assert check.ok, check.name


def test_free_particle_displays():
    ctx = MechContext.parse(1, "0")
    ring = ctx.ring
    th = build_mech_theory(ctx)
    dt = Form.dx(ring, 1)
    dq = Form.delta(ring, ring.fibre_coord((1,)))
    assert th.EL == wedge(dq, dt) * -ring.q(1, [1, 1])
    assert th.gamma == dq * ring.q(1, [1])
    energy = ring.q(1, [1]) * ring.q(1, [1]) / 2
    assert time_translation_momentum(ctx, th) == Form.scalar(-energy)


def test_harmonic_energy():
    ctx = MechContext.parse(1, "q1^2/2")
    ring = ctx.ring
    th = build_mech_theory(ctx)
    energy = (ring.q(1, [1]) * ring.q(1, [1]) + ring.q(1) * ring.q(1)) / 2
    assert time_translation_momentum(ctx, th) == Form.scalar(-energy)
