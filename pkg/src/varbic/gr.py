"""The Hilbert-Einstein theory on the jet bundle of lorentzian metrics."""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction

from .fields import (JetVectorField, SpacetimeField, StrictHorizontal, StrictVertical, coordinate_lift,
                     evolutionary_part)
from .formalg import (Form, euler_operator, horizontal_differential, interior_product, lie_derivative,
                      total_differential, vertical_differential, wedge)
from .geometry import geometry
from .jetscalar import JetRing, JetScalar, metric_ring

__all__ = [
    "LagrangianData",
    "IdentityCheck",
    "build_gr_theory",
    "gr_theory",
    "euler_operator",
    "covariant_delta_metric",
    "noether_current",
    "noether_current_closed_form",
    "verify_lepage_invariance",
    "verify_hamiltonian_pair",
    "HamiltonianCheck",
]

HALF = Fraction(1, 2)


class IdentityError(AssertionError):
    pass


@dataclass
class LagrangianData:
    """A lagrangian field theory together with its boundary form.

    ``lepage = L + gamma`` and ``omega = EL + δ gamma``.
    """

    ring: JetRing
    L: Form
    EL: Form
    gamma: Form
    lepage: Form = field(init=False)
    omega: Form = field(init=False)

    def __post_init__(self):
        self.lepage = self.L + self.gamma
        self.omega = self.EL + vertical_differential(self.gamma)

    def split_residual(self) -> Form:
        """``EL - δL - dγ``; zero for a valid boundary form."""
        return self.EL - vertical_differential(self.L) - horizontal_differential(self.gamma)


@dataclass
class IdentityCheck:
    """One exact identity ``lhs = rhs``; both sides are kept so the oracle can evaluate them separately."""

    name: str
    lhs: Form
    rhs: Form

    @property
    def residual(self) -> Form:
        return self.lhs - self.rhs

    @property
    def ok(self) -> bool:
        return self.residual.is_zero()


def covariant_delta_metric(ring: JetRing, a: int, b: int, c: int) -> Form:
    """``∇_c δg_{ab} = δg_{ab,c} - Γ^e_{ca} δg_{eb} - Γ^e_{cb} δg_{ae}``."""
    geo = geometry(ring)
    parts = [Form.delta(ring, ring.fibre_coord((a, b), [c]))]
    for e in range(1, ring.n + 1):
        parts.append(Form.delta(ring, ring.fibre_coord((e, b))) * (-geo.christoffel(e, c, a)))
        parts.append(Form.delta(ring, ring.fibre_coord((a, e))) * (-geo.christoffel(e, c, b)))
    return Form.sum(parts, ring)


def _boundary_form(ring: JetRing) -> Form:
    """``γ = g^{ad} g^{bc} (∇_c δg_{ab} - ∇_a δg_{bc}) ∧ ι_{∂̂_d} vol``."""
    geo = geometry(ring)
    idx = range(1, ring.n + 1)
    nabla = {(a, b, c): covariant_delta_metric(ring, a, b, c) for a in idx for b in idx for c in idx}
    parts = []
    for d in idx:
        inner = []
        for a in idx:
            for b in idx:
                for c in idx:
                    coeff = geo.ginv(a, d) * geo.ginv(b, c)
                    if coeff.is_zero():
                        continue
                    inner.append((nabla[(a, b, c)] - nabla[(b, c, a)]) * coeff)
        parts.append(wedge(Form.sum(inner, ring), geo.vol_contracted(d)))
    return Form.sum(parts, ring)


def build_gr_theory(n: int, jet_cap: int = 6, vsym_cap: int = 5, check: bool = True) -> LagrangianData:
    """Construct L = R vol, EL = -G^{ab} δg_{ab} ∧ vol and the boundary form γ.

    With ``check`` the split identity ``EL - δL = dγ`` is asserted exactly.
    """
    ring = metric_ring(n, jet_cap, vsym_cap)
    geo = geometry(ring)
    vol = geo.vol()
    L = Form.scalar(geo.scalar_curvature()) ^ vol
    idx = range(1, n + 1)
    src = Form.sum([Form.delta(ring, ring.fibre_coord((a, b))) * (-geo.einstein_upper(a, b))
                    for a in idx for b in idx], ring)
    EL = wedge(src, vol)
    theory = LagrangianData(ring, L, EL, _boundary_form(ring))
    if check:
        res = theory.split_residual()
        if not res.is_zero():
            raise IdentityError(f"EL - δL - dγ does not vanish: {res.to_text(max_terms=20)}")
    return theory


_theories: dict = {}
_theories_lock = threading.Lock()


def gr_theory(n: int, jet_cap: int = 6, vsym_cap: int = 5) -> LagrangianData:
    """Memoised :func:`build_gr_theory`."""
    key = (n, jet_cap, vsym_cap)
    with _theories_lock:
        hit = _theories.get(key)
    if hit is None:
        hit = build_gr_theory(n, jet_cap, vsym_cap)
        with _theories_lock:
            hit = _theories.setdefault(key, hit)
    return hit


def noether_current(theory: LagrangianData, v: SpacetimeField) -> Form:
    """``j_v = -ι_{v̂} L - ι_{ξ_v} γ``."""
    xi = StrictVertical(evolutionary_part(v))
    vhat = StrictHorizontal(v)
    return -(interior_product(vhat, theory.L) + interior_product(xi, theory.gamma))


def noether_current_closed_form(theory: LagrangianData, v: SpacetimeField) -> tuple[Form, Form]:
    """The two summands ``2 G^{ab} v_a ι_{∂̂_b} vol`` and ``d(½(∇^a v^b - ∇^b v^a) ι_{∂̂_a} ι_{∂̂_b} vol)``."""
    ring = theory.ring
    geo = geometry(ring)
    idx = range(1, ring.n + 1)
    v_low = geo.lower(v)
    bulk = Form.sum([geo.vol_contracted(b) * (geo.einstein_upper(a, b) * v_low[a - 1] * 2)
                     for a in idx for b in idx], ring)
    inner = []
    for a in idx:
        for b in idx:
            if a == b:
                continue
            coeff = (geo.nabla_vector_upper(v, a, b) - geo.nabla_vector_upper(v, b, a)) * HALF
            inner.append(geo.vol_contracted(a, b) * coeff)
    exact = horizontal_differential(Form.sum(inner, ring))
    return bulk, exact


def noether_checks(theory: LagrangianData, v: SpacetimeField) -> list[IdentityCheck]:
    ring = theory.ring
    geo = geometry(ring)
    idx = range(1, ring.n + 1)
    xi = StrictVertical(evolutionary_part(v))
    j = noether_current(theory, v)
    bulk, exact = noether_current_closed_form(theory, v)
    v_low = geo.lower(v)
    flux = Form.sum([geo.vol_contracted(a) * (geo.einstein_upper(a, b) * v_low[b - 1] * 2)
                     for a in idx for b in idx], ring)
    xi_el = interior_product(xi, theory.EL)
    return [
        IdentityCheck("noether.conservation", horizontal_differential(j), xi_el),
        IdentityCheck("noether.closed_form", j, bulk + exact),
        IdentityCheck("noether.source_divergence", xi_el, horizontal_differential(flux)),
    ]


def verify_lepage_invariance(theory: LagrangianData, v: SpacetimeField) -> list[IdentityCheck]:
    """Invariance of L and γ separately, plus the intermediate step for L."""
    ring = theory.ring
    geo = geometry(ring)
    xi = StrictVertical(evolutionary_part(v))
    vhat = StrictHorizontal(v)
    lie_xi_L = lie_derivative(xi, theory.L)
    lie_v_L = lie_derivative(vhat, theory.L)
    R = geo.scalar_curvature()
    flux = Form.sum([geo.vol_contracted(a) * (R * v.components[a - 1]) for a in range(1, ring.n + 1)], ring)
    lie_xi_g = lie_derivative(xi, theory.gamma)
    lie_v_g = lie_derivative(vhat, theory.gamma)
    return [
        IdentityCheck("lepage.L", lie_xi_L, -lie_v_L),
        IdentityCheck("lepage.gamma", lie_xi_g, -lie_v_g),
        IdentityCheck("lepage.horizontal_L", lie_v_L, horizontal_differential(flux)),
        IdentityCheck("lepage.vertical_L", lie_xi_L, -horizontal_differential(flux)),
    ]


@dataclass
class HamiltonianCheck:
    hamiltonian: Form      # ι_X ω + 𝐝α
    preserves_omega: Form  # 𝓛_X ω
    current: Form          # ι_{X⊥} EL - dj with j = -α_{(0,n-1)}

    @property
    def ok(self) -> bool:
        return self.hamiltonian.is_zero()


def _vertical_part(X: JetVectorField) -> JetVectorField | None:
    if getattr(X, "parts", None) is not None:
        return X.vertical_part()
    return X if X.has_vertical else None


def verify_hamiltonian_pair(theory: LagrangianData, X: JetVectorField, alpha: Form) -> HamiltonianCheck:
    ring = theory.ring
    n = ring.n
    if alpha and alpha.total_degrees() != {n - 1}:
        raise ValueError(f"hamiltonian forms have total degree {n - 1}")
    ham = interior_product(X, theory.omega) + total_differential(alpha)
    lie = lie_derivative(X, theory.omega)
    xperp = _vertical_part(X)
    j = -alpha.component(0, n - 1)
    el_part = interior_product(xperp, theory.EL) if xperp is not None else Form.zero(ring)
    return HamiltonianCheck(ham, lie, el_part - horizontal_differential(j))


def euler_self_check(theory: LagrangianData) -> IdentityCheck:
    return IdentityCheck("euler.P_deltaL", euler_operator(vertical_differential(theory.L)), theory.EL)


def einstein_checks(theory: LagrangianData) -> list[IdentityCheck]:
    ring = theory.ring
    geo = geometry(ring)
    out = [IdentityCheck(f"einstein.divergence[{b}]", Form.scalar(geo.einstein_divergence(b)), Form.zero(ring))
           for b in range(1, ring.n + 1)]
    return out


def einstein_tensor_form(theory: LagrangianData) -> Form:
    """All ``G^{ab}`` (a <= b) packed into one form keyed by ``δg_{ab}`` for zero-testing."""
    ring = theory.ring
    geo = geometry(ring)
    return Form.sum([Form.delta(ring, ring.fibre_coord((a, b))) * geo.einstein_upper(a, b)
                     for a, b in ring.schema.components], ring)


def coordinate_lifts(ring: JetRing) -> list:
    return [coordinate_lift(ring, a) for a in range(1, ring.n + 1)]
