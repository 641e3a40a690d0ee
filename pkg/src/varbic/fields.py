"""Vector fields on the jet bundle.

Three shapes are enough for everything the bicomplex needs:

* :class:`StrictVertical` -- the prolongation of an evolutionary field ξ, acting
  on ``δy_C`` by ``∂̂_C ξ_y`` (computed lazily and memoised),
* :class:`StrictHorizontal` -- the Cartan lift ``v̂ = v^a ∂̂_a`` of a spacetime
  vector field,
* :class:`SumField` -- a finite sum of the above, e.g. ``ρ(v) = ξ_v + v̂``.

Spacetime vector fields are :class:`SpacetimeField` values whose components
are JetScalars in the formal symbols ``∂_C v^a`` and/or the base coordinates.
"""
from __future__ import annotations

import threading
from fractions import Fraction
from typing import Iterable, Sequence

from .formalg import Form, horizontal_differential, interior_product, total_differential, vertical_differential
from .jetscalar import JetCoord, JetRing, JetScalar, MultiIndex, ParticleSchema, all_multi_indices

__all__ = [
    "SpacetimeField",
    "EvolutionaryField",
    "JetVectorField",
    "StrictVertical",
    "StrictHorizontal",
    "ExplicitVertical",
    "SumField",
    "prolong",
    "cartan_lift",
    "coordinate_lift",
    "evolutionary_part",
    "diffeo_action",
    "check_strict",
    "apply_to_scalar",
]


class SpacetimeField:
    """A vector field ``v = v^a ∂_a`` on the base with jet-independent components."""

    __slots__ = ("ring", "components", "name")

    def __init__(self, ring: JetRing, components: Sequence[JetScalar], name: str = "?"):
        if len(components) != ring.n:
            raise ValueError(f"vector field {name} has {len(components)} components, expected {ring.n}")
        for c in components:
            if c.ring is not ring:
                raise ValueError("component lives on a different jet ring")
            if any(k.kind == "fibre" for k in c.coords()):
                raise ValueError(f"component of {name} depends on field jets")
        self.ring = ring
        self.components = tuple(components)
        self.name = name

    @classmethod
    def formal(cls, ring: JetRing, label: str) -> "SpacetimeField":
        return cls(ring, [ring.vsym(label, a) for a in range(1, ring.n + 1)], label)

    @classmethod
    def coordinate(cls, ring: JetRing, a: int) -> "SpacetimeField":
        """The coordinate field ``∂_a``."""
        comps = [ring.const(1 if b == a else 0) for b in range(1, ring.n + 1)]
        return cls(ring, comps, f"d{a}")

    @classmethod
    def affine(cls, ring: JetRing, b: int, a: int) -> "SpacetimeField":
        """The field ``x^b ∂_a``."""
        comps = [ring.x(b) if c == a else ring.zero for c in range(1, ring.n + 1)]
        return cls(ring, comps, f"x{b}d{a}")

    def derivative(self, a: int, b: int) -> JetScalar:
        """``∂v^a / ∂x^b``."""
        return self.components[a - 1].total_derivative(b)

    def bracket(self, other: "SpacetimeField") -> "SpacetimeField":
        """The Lie bracket ``[v, w]^a = v^b ∂_b w^a - w^b ∂_b v^a``."""
        n = self.ring.n
        comps = []
        for a in range(1, n + 1):
            terms = []
            for b in range(1, n + 1):
                terms.append(self.components[b - 1] * other.derivative(a, b))
                terms.append(-(other.components[b - 1] * self.derivative(a, b)))
            comps.append(JetScalar.sum(terms, self.ring))
        return SpacetimeField(self.ring, comps, f"[{self.name},{other.name}]")

    def __add__(self, other: "SpacetimeField") -> "SpacetimeField":
        return SpacetimeField(self.ring, [a + b for a, b in zip(self.components, other.components)],
                              f"({self.name}+{other.name})")

    def scale(self, c) -> "SpacetimeField":
        return SpacetimeField(self.ring, [x * c for x in self.components], f"{c}*{self.name}")

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __eq__(self, other):
        if not isinstance(other, SpacetimeField):
            return NotImplemented
        return self.ring is other.ring and all(a == b for a, b in zip(self.components, other.components))

    __hash__ = None

    def __repr__(self):
        return f"SpacetimeField({self.name}: {', '.join(str(c) for c in self.components)})"


class EvolutionaryField:
    """Components ``ξ_y`` indexed by canonical fibre components (``(a,b)`` with ``a<=b``, or ``(i,)``)."""

    __slots__ = ("ring", "components")

    def __init__(self, ring: JetRing, components: dict):
        self.ring = ring
        comps = {}
        for comp, val in components.items():
            key = ring.schema.canonical(tuple(comp))
            if key in comps and comps[key] != val:
                raise ValueError(f"inconsistent values for symmetric component {key}")
            comps[key] = val
        self.components = {k: v for k, v in comps.items() if not v.is_zero()}

    def get(self, comp) -> JetScalar:
        return self.components.get(self.ring.schema.canonical(tuple(comp)), self.ring.zero)

    def __add__(self, other: "EvolutionaryField") -> "EvolutionaryField":
        keys = set(self.components) | set(other.components)
        return EvolutionaryField(self.ring, {k: self.get(k) + other.get(k) for k in keys})

    def scale(self, c) -> "EvolutionaryField":
        return EvolutionaryField(self.ring, {k: v * c for k, v in self.components.items()})

    def is_zero(self) -> bool:
        return not self.components


class JetVectorField:
    """Common interface consumed by :func:`varbic.formalg.interior_product`."""

    strict_kind: str | None = None
    has_vertical = False
    horizontal: tuple | None = None

    def vertical_image(self, ring: JetRing, coord: JetCoord) -> JetScalar | None:
        return None

    def __add__(self, other: "JetVectorField") -> "SumField":
        return SumField([self, other])


class StrictVertical(JetVectorField):
    """Prolongation of an evolutionary field."""

    strict_kind = "vertical"
    has_vertical = True

    def __init__(self, xi: EvolutionaryField, name: str = "ξ"):
        self.xi = xi
        self.ring = xi.ring
        self.name = name
        self._memo: dict = {}
        self._lock = threading.Lock()

    def vertical_image(self, ring, coord):
        if coord.kind != "fibre":
            return None
        key = (coord.comp, coord.order)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if coord.order.length == 0:
            val = self.xi.get(coord.comp)
        else:
            # peel the last direction and reuse the shorter prolongation
            d = coord.order.directions()[-1]
            prev = self.vertical_image(ring, coord._replace(order=coord.order.minus(d)))
            val = prev.total_derivative(d)
        with self._lock:
            self._memo[key] = val
        return val

    def __repr__(self):
        return f"StrictVertical({self.name})"


class ExplicitVertical(JetVectorField):
    """A vertical field given by its value on each ``δy_C`` (not necessarily a prolongation)."""

    has_vertical = True

    def __init__(self, ring: JetRing, images: dict):
        self.ring = ring
        self.images = dict(images)

    def vertical_image(self, ring, coord):
        return self.images.get(coord)


class StrictHorizontal(JetVectorField):
    """Cartan lift ``v̂ = v^a ∂̂_a``."""

    strict_kind = "horizontal"

    def __init__(self, field: SpacetimeField):
        self.field = field
        self.ring = field.ring
        self.horizontal = field.components
        self.name = f"{field.name}^"

    def __repr__(self):
        return f"StrictHorizontal({self.field.name})"


class SumField(JetVectorField):
    def __init__(self, parts: Iterable[JetVectorField]):
        flat = []
        for p in parts:
            flat.extend(p.parts if isinstance(p, SumField) else [p])
        self.parts = tuple(flat)
        self.ring = flat[0].ring if flat else None
        self.has_vertical = any(p.has_vertical for p in flat)
        horiz = [p.horizontal for p in flat if p.horizontal is not None]
        if horiz:
            self.horizontal = tuple(JetScalar.sum(cs, self.ring) for cs in zip(*horiz))
        else:
            self.horizontal = None
        kinds = {p.strict_kind for p in flat}
        self.strict_kind = kinds.pop() if len(kinds) == 1 else None

    def vertical_image(self, ring, coord):
        vals = [p.vertical_image(ring, coord) for p in self.parts if p.has_vertical]
        vals = [v for v in vals if v is not None]
        if not vals:
            return None
        return JetScalar.sum(vals, ring)

    def vertical_part(self) -> JetVectorField | None:
        vs = [p for p in self.parts if p.has_vertical]
        return SumField(vs) if vs else None

    def horizontal_part(self) -> JetVectorField | None:
        hs = [p for p in self.parts if p.horizontal is not None]
        return SumField(hs) if hs else None

    def __repr__(self):
        return " + ".join(repr(p) for p in self.parts)


def prolong(xi: EvolutionaryField, name: str = "ξ") -> StrictVertical:
    return StrictVertical(xi, name)


def cartan_lift(v: SpacetimeField) -> StrictHorizontal:
    return StrictHorizontal(v)


def coordinate_lift(ring: JetRing, a: int) -> StrictHorizontal:
    """``∂̂_a``."""
    return StrictHorizontal(SpacetimeField.coordinate(ring, a))


def evolutionary_part(v: SpacetimeField) -> EvolutionaryField:
    """Components of ``ξ_v``: minus the Lie derivative of the field along v.

    Metric: ``ξ_{ab} = -(v^c g_{ab,c} + ∂_a v^c g_{cb} + ∂_b v^c g_{ac})``.
    Scalar fields (particle mechanics): ``ξ^i = -v^c q^i_{,c}``.
    """
    ring = v.ring
    n = ring.n
    comps = {}
    if ring.schema.metric:
        for a, b in ring.schema.components:
            terms = []
            for c in range(1, n + 1):
                terms.append(v.components[c - 1] * ring.g(a, b, [c]))
                terms.append(v.derivative(c, a) * ring.g(c, b))
                terms.append(v.derivative(c, b) * ring.g(a, c))
            comps[(a, b)] = -JetScalar.sum(terms, ring)
    elif isinstance(ring.schema, ParticleSchema):
        for (i,) in ring.schema.components:
            comps[(i,)] = -JetScalar.sum([v.components[c - 1] * ring.q(i, [c]) for c in range(1, n + 1)], ring)
    else:
        raise TypeError(f"no diffeomorphism action for {ring.schema!r}")
    return EvolutionaryField(ring, comps)


def diffeo_action(v: SpacetimeField) -> SumField:
    """``ρ(v) = ξ_v + v̂``."""
    return SumField([StrictVertical(evolutionary_part(v), f"ξ_{v.name}"), StrictHorizontal(v)])


def apply_to_scalar(X: JetVectorField, f: JetScalar) -> JetScalar:
    """The derivation ``X(f) = ι_X 𝐝f``."""
    out = interior_product(X, total_differential(Form.scalar(f)))
    return out.coefficient() if out else f.ring.zero


def _generators(ring: JetRing, max_order: int):
    for C in all_multi_indices(ring.n, max_order):
        for comp in ring.schema.components:
            yield ring.fibre_coord(comp, C)


def check_strict(X: JetVectorField, max_order: int | None = None) -> str:
    """Classify X as ``"vertical"``, ``"horizontal"``, ``"both"`` (the zero field) or ``"neither"``.

    Evaluates the graded commutators ``[ι_X, d]`` and ``[ι_X, δ]`` on every
    generator ``y_C``, ``δy_C`` (``|C| <= max_order``) and ``dx^a``.
    """
    ring = X.ring
    if max_order is None:
        max_order = ring.jet_cap - 1
    gens: list[Form] = []
    for y in _generators(ring, max_order):
        gens.append(Form.scalar(ring.coord(y)))
        gens.append(Form.delta(ring, y))
    for a in range(1, ring.n + 1):
        gens.append(Form.dx(ring, a))

    def commutes(diff) -> bool:
        for g in gens:
            lhs = interior_product(X, diff(g)) + diff(interior_product(X, g))
            if not lhs.is_zero():
                return False
        return True

    vert = commutes(horizontal_differential)
    horiz = commutes(vertical_differential)
    if vert and horiz:
        return "both"
    if vert:
        return "vertical"
    if horiz:
        return "horizontal"
    return "neither"
