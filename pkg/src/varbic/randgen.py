"""Seeded random jet scalars, forms and index families for property checks."""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .formalg import Form
from .geometry import CONTRA, FormFamily
from .jetscalar import JetCoord, JetRing, JetScalar, all_multi_indices, product_of

__all__ = ["random_scalar", "random_form", "random_family", "fibre_coords"]


def fibre_coords(ring: JetRing, max_order: int) -> list[JetCoord]:
    out = []
    for order in all_multi_indices(ring.n, max_order):
        for comp in ring.schema.components:
            out.append(ring.fibre_coord(comp, order))
    return out


def _rational(rng: random.Random) -> Fraction:
    num = 0
    while num == 0:
        num = rng.randint(-5, 5)
    return Fraction(num, rng.randint(1, 3))


def random_scalar(ring: JetRing, rng: random.Random, max_order: int = 1, nterms: int = 2,
                  with_s: bool = True) -> JetScalar:
    """A short polynomial in jet coordinates and ``x``, sometimes times ``s`` or over ``det g``."""
    coords = fibre_coords(ring, max_order)
    terms = []
    for _ in range(nterms):
        factors = [ring.coord(rng.choice(coords)) for _ in range(rng.randint(0, 2))]
        if rng.random() < 0.25:
            factors.append(ring.x(rng.randint(1, ring.n)))
        t = product_of(factors, ring) * _rational(rng)
        if ring.schema.metric and with_s:
            r = rng.random()
            if r < 0.2:
                t = t * ring.s
            elif r < 0.35:
                t = t / ring.det_g()
        terms.append(t)
    return JetScalar.sum(terms, ring)


def random_form(ring: JetRing, rng: random.Random, p: int, q: int, nterms: int = 2,
                max_order: int = 1, coeff_order: int = 1) -> Form:
    """A sum of ``nterms`` random monomials of bidegree ``(p, q)``."""
    if q > ring.n:
        raise ValueError(f"horizontal degree {q} exceeds dimension {ring.n}")
    coords = fibre_coords(ring, max_order)
    parts = []
    for _ in range(nterms):
        vert = rng.sample(coords, p)
        horiz = rng.sample(range(1, ring.n + 1), q)
        coeff = random_scalar(ring, rng, coeff_order, nterms=1)
        if coeff.is_zero():
            coeff = ring.one
        parts.append(Form.monomial(coeff, vert, horiz))
    return Form.sum(parts, ring)


def random_family(ring: JetRing, rng: random.Random, arity: int, p: int, q: int,
                  antisymmetric: bool = False, nterms: int = 1) -> FormFamily:
    """A contravariant index family with random ``(p, q)`` entries."""
    if antisymmetric and arity != 2:
        raise ValueError("antisymmetric families have arity 2")
    n = ring.n
    entries = {}
    if antisymmetric:
        for a in range(1, n + 1):
            entries[(a, a)] = Form.zero(ring)
            for b in range(a + 1, n + 1):
                f = random_form(ring, rng, p, q, nterms)
                entries[(a, b)] = f
                entries[(b, a)] = -f
    else:
        for idx in itertools.product(range(1, n + 1), repeat=arity):
            entries[idx] = random_form(ring, rng, p, q, nterms)
    return FormFamily(ring, (CONTRA,) * arity, entries)
