"""Levi-Civita geometry inside the bicomplex: curvature, volume, covariant families.

Everything is memoised per jet ring through :func:`geometry`.
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .fields import SpacetimeField, coordinate_lift, diffeo_action
from .formalg import (Form, coordinate_volume, horizontal_differential, interior_product, lie_derivative,
                      lie_total_derivative, wedge)
from .jetscalar import JetRing, JetScalar

__all__ = [
    "CO",
    "CONTRA",
    "Geometry",
    "geometry",
    "FormFamily",
    "CovarianceResult",
    "covariant_derivative",
    "check_covariance",
    "verify_divergence_1",
    "verify_divergence_2",
    "divergence_1_sides",
    "divergence_2_sides",
    "covariance_residual",
    "metric_family",
    "inverse_metric_family",
    "christoffel_family",
    "delta_metric_family",
]

CO = "co"
CONTRA = "contra"

HALF = Fraction(1, 2)


class Geometry:
    """Connection and curvature of the universal metric ``g_{ab}`` on one jet ring."""

    def __init__(self, ring: JetRing):
        if not ring.schema.metric:
            raise TypeError("geometry needs the metric bundle")
        self.ring = ring
        self.n = ring.n
        self._cache: dict = {}
        self._lock = threading.RLock()

    def _memo(self, key, build: Callable[[], object]):
        hit = self._cache.get(key)
        if hit is None:
            hit = build()
            with self._lock:
                self._cache.setdefault(key, hit)
        return hit

    @property
    def indices(self):
        return range(1, self.n + 1)

    def ginv(self, a: int, b: int) -> JetScalar:
        return self._memo(("ginv", min(a, b), max(a, b)), lambda: self.ring.inverse_metric(a, b))

    def christoffel(self, a: int, b: int, c: int) -> JetScalar:
        """``Γ^a_{bc} = ½ g^{ad}(g_{db,c} + g_{dc,b} - g_{bc,d})``."""
        b, c = min(b, c), max(b, c)
        R = self.ring

        def build():
            lower = [R.g(d, b, [c]) + R.g(d, c, [b]) - R.g(b, c, [d]) for d in self.indices]
            return JetScalar.sum([self.ginv(a, d) * lower[d - 1] for d in self.indices], R) * HALF

        return self._memo(("Gamma", a, b, c), build)

    def riemann(self, a: int, b: int, c: int, d: int) -> JetScalar:
        """``Riem_{abc}^d = ∂̂_b Γ^d_{ac} - ∂̂_a Γ^d_{bc} + Γ^e_{ac}Γ^d_{eb} - Γ^e_{bc}Γ^d_{ea}``."""
        if a == b:
            return self.ring.zero
        if a > b:
            return -self.riemann(b, a, c, d)
        G = self.christoffel

        def build():
            terms = [G(d, a, c).total_derivative(b), -G(d, b, c).total_derivative(a)]
            for e in self.indices:
                terms.append(G(e, a, c) * G(d, e, b))
                terms.append(-(G(e, b, c) * G(d, e, a)))
            return JetScalar.sum(terms, self.ring)

        return self._memo(("Riem", a, b, c, d), build)

    def ricci(self, a: int, b: int) -> JetScalar:
        a, b = min(a, b), max(a, b)
        return self._memo(("Ric", a, b),
                          lambda: JetScalar.sum([self.riemann(a, e, b, e) for e in self.indices], self.ring))

    def scalar_curvature(self) -> JetScalar:
        def build():
            return JetScalar.sum([self.ginv(a, b) * self.ricci(a, b) for a in self.indices for b in self.indices],
                                 self.ring)

        return self._memo(("R",), build)

    def ricci_upper(self, a: int, b: int) -> JetScalar:
        a, b = min(a, b), max(a, b)

        def build():
            return JetScalar.sum([self.ginv(a, c) * self.ginv(b, d) * self.ricci(c, d)
                                  for c in self.indices for d in self.indices], self.ring)

        return self._memo(("Ric^", a, b), build)

    def einstein_upper(self, a: int, b: int) -> JetScalar:
        """``G^{ab} = Ric^{ab} - ½ R g^{ab}``."""
        a, b = min(a, b), max(a, b)
        return self._memo(("G^", a, b),
                          lambda: self.ricci_upper(a, b) - self.scalar_curvature() * self.ginv(a, b) * HALF)

    def einstein_divergence(self, b: int) -> JetScalar:
        """``∇_a G^{ab}``."""
        R = self.ring
        G, Gam = self.einstein_upper, self.christoffel
        terms = []
        for a in self.indices:
            terms.append(G(a, b).total_derivative(a))
            for e in self.indices:
                terms.append(Gam(a, a, e) * G(e, b))
                terms.append(Gam(b, a, e) * G(a, e))
        return JetScalar.sum(terms, R)

    def vol(self) -> Form:
        """``s dx^1 ∧ ... ∧ dx^n``."""
        return self._memo(("vol",), lambda: Form.scalar(self.ring.s) ^ coordinate_volume(self.ring))

    def vol_contracted(self, *indices: int) -> Form:
        """``ι_{∂̂_{a_1}} ⋯ ι_{∂̂_{a_k}} vol`` (innermost contraction last in the argument list)."""
        def build():
            out = self.vol()
            for a in reversed(indices):
                out = interior_product(coordinate_lift(self.ring, a), out)
            return out

        return self._memo(("volc",) + tuple(indices), build)

    # helpers on spacetime vector fields
    def lower(self, v: SpacetimeField) -> list[JetScalar]:
        return [JetScalar.sum([self.ring.g(a, b) * v.components[b - 1] for b in self.indices], self.ring)
                for a in self.indices]

    def nabla_vector(self, v: SpacetimeField, a: int, b: int) -> JetScalar:
        """``∇_a v^b = ∂_a v^b + Γ^b_{ae} v^e``."""
        terms = [v.derivative(b, a)]
        terms += [self.christoffel(b, a, e) * v.components[e - 1] for e in self.indices]
        return JetScalar.sum(terms, self.ring)

    def nabla_vector_upper(self, v: SpacetimeField, a: int, b: int) -> JetScalar:
        """``∇^a v^b = g^{ac} ∇_c v^b``."""
        return JetScalar.sum([self.ginv(a, c) * self.nabla_vector(v, c, b) for c in self.indices], self.ring)

    def divergence_vector(self, v: SpacetimeField) -> JetScalar:
        return JetScalar.sum([self.nabla_vector(v, a, a) for a in self.indices], self.ring)


_geoms: dict = {}
_geoms_lock = threading.Lock()


def geometry(ring: JetRing) -> Geometry:
    with _geoms_lock:
        geo = _geoms.get(id(ring))
        if geo is None or geo.ring is not ring:
            geo = Geometry(ring)
            _geoms[id(ring)] = geo
        return geo


@dataclass
class FormFamily:
    """Index tuples ``(i_1, ..., i_k)`` (each in 1..n) mapped to forms, with a variance per slot."""

    ring: JetRing
    signature: tuple
    entries: dict

    def __post_init__(self):
        for s in self.signature:
            if s not in (CO, CONTRA):
                raise ValueError(f"unknown variance {s!r}")
        self.signature = tuple(self.signature)

    @classmethod
    def build(cls, ring: JetRing, signature: Sequence[str], fn) -> "FormFamily":
        entries = {}
        for idx in itertools.product(range(1, ring.n + 1), repeat=len(signature)):
            val = fn(*idx)
            entries[idx] = val if isinstance(val, Form) else Form.scalar(val)
        return cls(ring, tuple(signature), entries)

    @property
    def arity(self) -> int:
        return len(self.signature)

    def __getitem__(self, idx) -> Form:
        if not isinstance(idx, tuple):
            idx = (idx,)
        return self.entries[idx]

    def indices(self):
        return itertools.product(range(1, self.ring.n + 1), repeat=self.arity)

    def map(self, fn, signature=None) -> "FormFamily":
        return FormFamily(self.ring, signature or self.signature, {k: fn(v) for k, v in self.entries.items()})

    def is_zero(self) -> bool:
        return all(f.is_zero() for f in self.entries.values())


def _replace(idx: tuple, k: int, e: int) -> tuple:
    return idx[:k] + (e,) + idx[k + 1:]


def covariant_derivative(chi: FormFamily) -> FormFamily:
    """``(∇χ)_{c, I} = 𝓛_{∂̂_c} χ_I`` minus Γ-corrections per covariant slot, plus per contravariant slot."""
    ring = chi.ring
    geo = geometry(ring)
    n = ring.n
    entries = {}
    for c in range(1, n + 1):
        lies = {idx: lie_total_derivative(f, c) for idx, f in chi.entries.items()}
        for idx in chi.indices():
            parts = [lies[idx]]
            for k, var in enumerate(chi.signature):
                for e in range(1, n + 1):
                    if var == CO:
                        gam = geo.christoffel(e, c, idx[k])
                        if not gam.is_zero():
                            parts.append(chi.entries[_replace(idx, k, e)] * (-gam))
                    else:
                        gam = geo.christoffel(idx[k], c, e)
                        if not gam.is_zero():
                            parts.append(chi.entries[_replace(idx, k, e)] * gam)
            entries[(c,) + idx] = Form.sum(parts, ring)
    return FormFamily(ring, (CO,) + chi.signature, entries)


@dataclass
class CovarianceResult:
    ok: bool
    residuals: dict  # index tuple -> residual Form (only nonzero entries)


def covariance_residual(chi: FormFamily, v: SpacetimeField) -> dict:
    """``𝓛_{ρ(v)} χ_I`` minus the tensor transformation rule prescribed by the signature."""
    ring = chi.ring
    rho = diffeo_action(v)
    n = ring.n
    out = {}
    for idx in chi.indices():
        parts = [lie_derivative(rho, chi.entries[idx])]
        for k, var in enumerate(chi.signature):
            for e in range(1, n + 1):
                other = chi.entries[_replace(idx, k, e)]
                if other.is_zero():
                    continue
                if var == CO:
                    # expected: -∂_{i_k} v^e χ_{..e..}
                    coef = v.derivative(e, idx[k])
                else:
                    # expected: +∂_e v^{i_k} χ_{..e..}
                    coef = -v.derivative(idx[k], e)
                if not coef.is_zero():
                    parts.append(other * coef)
        res = Form.sum(parts, ring)
        if not res.is_zero():
            out[idx] = res
    return out


def check_covariance(chi: FormFamily, fields: Sequence[SpacetimeField]) -> CovarianceResult:
    residuals = {}
    for v in fields:
        for idx, res in covariance_residual(chi, v).items():
            residuals[(v.name,) + idx] = res
    return CovarianceResult(not residuals, residuals)


def metric_family(ring: JetRing) -> FormFamily:
    return FormFamily.build(ring, (CO, CO), lambda a, b: ring.g(a, b))


def inverse_metric_family(ring: JetRing) -> FormFamily:
    geo = geometry(ring)
    return FormFamily.build(ring, (CONTRA, CONTRA), geo.ginv)


def christoffel_family(ring: JetRing) -> FormFamily:
    geo = geometry(ring)
    return FormFamily.build(ring, (CONTRA, CO, CO), geo.christoffel)


def delta_metric_family(ring: JetRing) -> FormFamily:
    return FormFamily.build(ring, (CO, CO), lambda a, b: Form.delta(ring, ring.fibre_coord((a, b))))


def _form_degree(chi: FormFamily) -> tuple[int, int] | None:
    degs = set()
    for f in chi.entries.values():
        degs |= f.bidegrees()
    if not degs:
        return None
    if len(degs) != 1:
        raise ValueError(f"family entries have mixed bidegrees {sorted(degs)}")
    return degs.pop()


def divergence_1_sides(chi: FormFamily) -> tuple[Form, Form]:
    """Both sides of ``∇_a χ^a ∧ vol = (-1)^p d(χ^a ∧ ι_{∂̂_a} vol)``."""
    if chi.signature != (CONTRA,):
        raise ValueError("expected a contravariant family of arity 1")
    deg = _form_degree(chi)
    ring = chi.ring
    if deg is None:
        return Form.zero(ring), Form.zero(ring)
    p, q = deg
    if q != 0:
        raise ValueError(f"expected (p,0)-forms, got bidegree {deg}")
    geo = geometry(ring)
    nab = covariant_derivative(chi)
    div = Form.sum([nab[(a, a)] for a in range(1, ring.n + 1)], ring)
    lhs = wedge(div, geo.vol())
    inner = Form.sum([wedge(chi[(a,)], geo.vol_contracted(a)) for a in range(1, ring.n + 1)], ring)
    rhs = horizontal_differential(inner) * (-1 if p % 2 else 1)
    return lhs, rhs


def verify_divergence_1(chi: FormFamily) -> bool:
    lhs, rhs = divergence_1_sides(chi)
    return (lhs - rhs).is_zero()


def divergence_2_sides(chi: FormFamily, sign_exponent: str = "p+q") -> tuple[Form, Form]:
    """Both sides of ``∇_a χ^{ab} ∧ ι_{∂̂_b} vol = ±d(½ χ^{ab} ∧ ι_{∂̂_a} ι_{∂̂_b} vol)``.

    The family must be antisymmetric with entries of bidegree ``(p, q)``, ``q <= 1``.
    The sign is ``(-1)^(p+q)``; with ``sign_exponent="p"`` the sign ``(-1)^p``
    is used regardless of ``q`` (differs from the identity when ``q = 1``).
    """
    if chi.signature != (CONTRA, CONTRA):
        raise ValueError("expected a contravariant family of arity 2")
    ring = chi.ring
    n = ring.n
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            if not (chi[(a, b)] + chi[(b, a)]).is_zero():
                raise ValueError(f"family is not antisymmetric at ({a},{b})")
    deg = _form_degree(chi)
    if deg is None:
        return Form.zero(ring), Form.zero(ring)
    p, q = deg
    if q > 1:
        raise ValueError(f"expected (p,0)- or (p,1)-forms, got bidegree {deg}")
    exponent = p + q if sign_exponent == "p+q" else p
    geo = geometry(ring)
    nab = covariant_derivative(chi)
    lhs = Form.sum([wedge(nab[(a, a, b)], geo.vol_contracted(b))
                    for a in range(1, n + 1) for b in range(1, n + 1)], ring)
    inner = Form.sum([wedge(chi[(a, b)], geo.vol_contracted(a, b)) * HALF
                      for a in range(1, n + 1) for b in range(1, n + 1) if a != b], ring)
    rhs = horizontal_differential(inner) * (-1 if exponent % 2 else 1)
    return lhs, rhs


def verify_divergence_2(chi: FormFamily, sign_exponent: str = "p+q") -> bool:
    lhs, rhs = divergence_2_sides(chi, sign_exponent)
    return (lhs - rhs).is_zero()
