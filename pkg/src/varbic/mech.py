"""Classical mechanics of a unit-mass particle in a polynomial potential.

Base dimension 1 (time ``t = x^1``), fibre coordinates ``q^1..q^m``.  The jet
coordinates ``q^i_{,1}``, ``q^i_{,11}``, ... are the velocities, accelerations
and so on.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .dsl import Polynomial, parse_polynomial
from .fields import SpacetimeField, StrictHorizontal, StrictVertical, apply_to_scalar, diffeo_action, evolutionary_part
from .formalg import (Form, euler_operator, horizontal_differential, interior_product, lie_derivative,
                      total_differential, vertical_differential, wedge)
from .gr import IdentityCheck, LagrangianData
from .jetscalar import JetRing, JetScalar, particle_ring

__all__ = ["MechContext", "build_mech_theory", "mech_checks", "time_translation_momentum", "potential_scalar"]

HALF = Fraction(1, 2)


@dataclass
class MechContext:
    m: int = 1
    potential: Polynomial | None = None
    jet_cap: int = 6

    @classmethod
    def parse(cls, m: int, text: str, jet_cap: int = 6) -> "MechContext":
        return cls(m, parse_polynomial(text, [f"q{i}" for i in range(1, m + 1)]), jet_cap)

    @property
    def ring(self) -> JetRing:
        return particle_ring(self.m, self.jet_cap)


def potential_scalar(ctx: MechContext) -> JetScalar:
    ring = ctx.ring
    if not ctx.potential:
        return ring.zero
    terms = []
    for exps, c in ctx.potential.items():
        t = ring.const(c)
        for i, e in enumerate(exps, start=1):
            if e:
                t = t * ring.q(i) ** e
        terms.append(t)
    return JetScalar.sum(terms, ring)


def _velocity(ring: JetRing, i: int) -> JetScalar:
    return ring.q(i, [1])


def _acceleration(ring: JetRing, i: int) -> JetScalar:
    return ring.q(i, [1, 1])


def _dq(ring: JetRing, i: int, order=()) -> Form:
    return Form.delta(ring, ring.fibre_coord((i,), order))


def build_mech_theory(ctx: MechContext) -> LagrangianData:
    """``L = (½ q̇^i q̇^i - V) dt``, ``EL = -(q̈^i + ∂V/∂q^i) δq^i ∧ dt``, ``γ = q̇^i δq^i``."""
    ring = ctx.ring
    V = potential_scalar(ctx)
    dt = Form.dx(ring, 1)
    idx = range(1, ctx.m + 1)
    kinetic = JetScalar.sum([_velocity(ring, i) * _velocity(ring, i) for i in idx], ring) * HALF
    L = Form.scalar(kinetic - V) ^ dt
    EL = Form.sum([wedge(_dq(ring, i), dt) * -(_acceleration(ring, i) + V.partial(ring.fibre_coord((i,))))
                   for i in idx], ring)
    gamma = Form.sum([_dq(ring, i) * _velocity(ring, i) for i in idx], ring)
    return LagrangianData(ring, L, EL, gamma)


def printed_omega(ctx: MechContext, theory: LagrangianData) -> Form:
    """``ω = -(q̈^i + ∂V/∂q^i) δq^i ∧ dt + δq̇^i ∧ δq^i``."""
    ring = ctx.ring
    return theory.EL + Form.sum([wedge(_dq(ring, i, [1]), _dq(ring, i)) for i in range(1, ctx.m + 1)], ring)


def energy(ctx: MechContext) -> JetScalar:
    ring = ctx.ring
    idx = range(1, ctx.m + 1)
    return JetScalar.sum([_velocity(ring, i) * _velocity(ring, i) for i in idx], ring) * HALF + potential_scalar(ctx)


def time_translation_momentum(ctx: MechContext, theory: LagrangianData) -> Form:
    """``μ_1(∂_t) = ι_{ρ(∂_t)}(L + γ)``."""
    rho = diffeo_action(SpacetimeField.coordinate(ctx.ring, 1))
    return interior_product(rho, theory.lepage)


def mech_checks(ctx: MechContext) -> list[IdentityCheck]:
    ring = ctx.ring
    theory = build_mech_theory(ctx)
    dt_field = SpacetimeField.coordinate(ring, 1)
    rho = diffeo_action(dt_field)
    xi = StrictVertical(evolutionary_part(dt_field))
    that = StrictHorizontal(dt_field)
    zero = Form.zero(ring)
    checks = [
        IdentityCheck("mech.split", vertical_differential(theory.L), theory.EL - horizontal_differential(theory.gamma)),
        IdentityCheck("mech.euler", euler_operator(vertical_differential(theory.L)), theory.EL),
        IdentityCheck("mech.omega", theory.omega, printed_omega(ctx, theory)),
        IdentityCheck("mech.omega_exact", total_differential(theory.lepage), theory.omega),
    ]
    # ρ(∂_t) acts as ∂/∂t: kills every jet coordinate of q, sends t to 1,
    # and annihilates the full differentials 𝐝q^i_C
    lhs, rhs = [], []
    for i in range(1, ctx.m + 1):
        for k in range(ring.jet_cap):
            order = [1] * k
            q = ring.q(i, order)
            lhs.append(Form.scalar(apply_to_scalar(rho, q)))
            lhs.append(interior_product(rho, total_differential(Form.scalar(q))))
    lhs.append(Form.scalar(apply_to_scalar(rho, ring.x(1)) - 1))
    lhs.append(Form.scalar(interior_product(rho, Form.dx(ring, 1)).coefficient() - 1))
    checks.append(IdentityCheck("mech.rho_dt", Form.sum(lhs, ring), zero))
    checks.append(IdentityCheck("mech.lepage_invariant", lie_derivative(rho, theory.lepage), zero))
    j = -(interior_product(that, theory.L) + interior_product(xi, theory.gamma))
    checks.append(IdentityCheck("mech.energy", j, Form.scalar(energy(ctx))))
    checks.append(IdentityCheck("mech.momentum", time_translation_momentum(ctx, theory), -j))
    checks.append(IdentityCheck("mech.gamma_degree", interior_product(that, theory.gamma), zero))
    checks.append(IdentityCheck("mech.noether", horizontal_differential(j), interior_product(xi, theory.EL)))
    return checks
