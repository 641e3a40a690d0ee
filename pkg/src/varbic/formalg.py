"""Bigraded differential forms on the jet bundle.

A monomial is ``f * δy_1 ∧ ... ∧ δy_p ∧ dx^{e_1} ∧ ... ∧ dx^{e_q}`` with the
vertical generators first, each block sorted.  A :class:`Form` is a finite
sum of monomials; components of different bidegree may coexist (so that
``L + γ`` or ``EL + δγ`` are single objects).

Vector fields enter through a small duck-typed interface implemented in
:mod:`varbic.fields`:

* ``X.vertical_image(ring, coord)`` returns ``ι_X δy`` for a fibre jet
  coordinate (or ``None`` if X has no vertical part),
* ``X.horizontal`` is ``None`` or a tuple of ``n`` JetScalars ``v^a``.
"""
from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Iterable

from .jetscalar import DimensionMismatch, JetCoord, JetRing, JetScalar, coord_symbol, format_scalar

__all__ = [
    "Form",
    "wedge",
    "vertical_differential",
    "horizontal_differential",
    "total_differential",
    "interior_product",
    "lie_derivative",
    "lie_total_derivative",
    "euler_operator",
    "coordinate_volume",
]

Key = tuple  # (tuple[JetCoord, ...], tuple[int, ...])


def _merge_sorted(seq):
    """Sort a sequence of distinct generators; returns (sign, sorted) or (0, None) on a repeat."""
    items = list(seq)
    sign = 1
    # insertion sort, counting transpositions; sequences are short
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
        if j > 0 and items[j - 1] == items[j]:
            return 0, None
    return sign, tuple(items)


class _Acc:
    """Accumulates ``key -> [scalars]`` and sums each bucket once."""

    __slots__ = ("ring", "buckets")

    def __init__(self, ring: JetRing):
        self.ring = ring
        self.buckets: dict = defaultdict(list)

    def add(self, key, coeff: JetScalar, sign: int = 1):
        if sign == 0:
            return
        self.buckets[key].append(coeff if sign > 0 else -coeff)

    def add_raw(self, vert, horiz, coeff: JetScalar, sign: int = 1):
        sv, v = _merge_sorted(vert)
        if not sv:
            return
        sh, h = _merge_sorted(horiz)
        if not sh:
            return
        self.add((v, h), coeff, sign * sv * sh)

    def form(self) -> "Form":
        terms = {}
        for key, items in self.buckets.items():
            c = items[0] if len(items) == 1 else JetScalar.sum(items, self.ring)
            if not c.is_zero():
                terms[key] = c
        return Form(self.ring, terms)


class Form:
    """Immutable sum of bigraded monomials with JetScalar coefficients."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: JetRing, terms: dict | None = None):
        self.ring = ring
        self.terms: dict = terms or {}

    # -- constructors ----------------------------------------------------
    @classmethod
    def zero(cls, ring: JetRing) -> "Form":
        return cls(ring, {})

    @classmethod
    def scalar(cls, f: JetScalar) -> "Form":
        if f.is_zero():
            return cls(f.ring, {})
        return cls(f.ring, {((), ()): f})

    @classmethod
    def dx(cls, ring: JetRing, *indices: int) -> "Form":
        for a in indices:
            if not 1 <= a <= ring.n:
                raise IndexError(f"dx index {a} out of range 1..{ring.n}")
        sign, h = _merge_sorted(indices)
        if not sign:
            return cls(ring, {})
        return cls(ring, {((), h): ring.const(sign)})

    @classmethod
    def delta(cls, ring: JetRing, coord: JetCoord) -> "Form":
        if coord.kind != "fibre":
            raise ValueError("vertical generators exist only for fibre coordinates")
        ring.var_index(coord)  # validates the jet-order cap
        return cls(ring, {((coord,), ()): ring.one})

    @classmethod
    def monomial(cls, coeff: JetScalar, vert: Iterable[JetCoord] = (), horiz: Iterable[int] = ()) -> "Form":
        acc = _Acc(coeff.ring)
        acc.add_raw(tuple(vert), tuple(horiz), coeff)
        return acc.form()

    # -- structure -------------------------------------------------------
    def bidegrees(self) -> set[tuple[int, int]]:
        return {(len(v), len(h)) for v, h in self.terms}

    def bidegree(self) -> tuple[int, int]:
        """The single bidegree of a homogeneous nonzero form; raises otherwise."""
        degs = self.bidegrees()
        if len(degs) != 1:
            raise ValueError(f"form is not homogeneous: bidegrees {sorted(degs)}")
        return next(iter(degs))

    def total_degrees(self) -> set[int]:
        return {p + q for p, q in self.bidegrees()}

    def component(self, p: int, q: int) -> "Form":
        return Form(self.ring, {k: c for k, c in self.terms.items() if len(k[0]) == p and len(k[1]) == q})

    def components(self) -> dict[tuple[int, int], "Form"]:
        return {pq: self.component(*pq) for pq in sorted(self.bidegrees())}

    def coefficient(self, vert: Iterable[JetCoord] = (), horiz: Iterable[int] = ()) -> JetScalar:
        """Coefficient of the (sorted, sign-adjusted) generator product."""
        sv, v = _merge_sorted(tuple(vert))
        sh, h = _merge_sorted(tuple(horiz))
        if not sv or not sh:
            return self.ring.zero
        c = self.terms.get((v, h))
        if c is None:
            return self.ring.zero
        return c if sv * sh > 0 else -c

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def nterms(self) -> int:
        return sum(c.nterms() for c in self.terms.values())

    # -- algebra ---------------------------------------------------------
    def _check(self, other: "Form") -> None:
        if other.ring is not self.ring:
            raise DimensionMismatch("forms live on different jet rings")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        if not isinstance(other, Form):
            return NotImplemented
        self._check(other)
        return Form.sum([self, other], self.ring)

    __radd__ = __add__

    def __neg__(self):
        return Form(self.ring, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self + (-other)

    def __mul__(self, factor):
        """Multiply by a scalar (JetScalar, int or Fraction)."""
        if isinstance(factor, (int, Fraction)):
            if factor == 0:
                return Form(self.ring, {})
            return Form(self.ring, {k: c * factor for k, c in self.terms.items()})
        if isinstance(factor, JetScalar):
            if factor.ring is not self.ring:
                raise DimensionMismatch("scalar and form live on different jet rings")
            if factor.is_zero():
                return Form(self.ring, {})
            out = {}
            for k, c in self.terms.items():
                p = c * factor
                if not p.is_zero():
                    out[k] = p
            return Form(self.ring, out)
        return NotImplemented

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)

    @staticmethod
    def sum(forms: Iterable["Form"], ring: JetRing | None = None) -> "Form":
        acc = None
        for f in forms:
            if acc is None:
                ring = ring or f.ring
                acc = _Acc(ring)
            if f.ring is not ring:
                raise DimensionMismatch("forms live on different jet rings")
            for k, c in f.terms.items():
                acc.add(k, c)
        if acc is None:
            if ring is None:
                raise ValueError("empty sum needs an explicit ring")
            return Form(ring, {})
        return acc.form()

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return self.is_zero()
        if not isinstance(other, Form):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def map_coefficients(self, fn) -> "Form":
        acc = _Acc(self.ring)
        for k, c in self.terms.items():
            acc.add(k, fn(c))
        return acc.form()

    # -- printing --------------------------------------------------------
    def sorted_items(self):
        return sorted(self.terms.items(), key=lambda kv: (len(kv[0][0]), len(kv[0][1]), kv[0]))

    def to_text(self, max_terms: int | None = None) -> str:
        if not self.terms:
            return "0"
        parts = []
        items = self.sorted_items()
        for (v, h), c in items[: max_terms or None]:
            gens = [f"δ{coord_symbol(self.ring, y)}" for y in v] + [f"dx^{e}" for e in h]
            coeff = format_scalar(c)
            if not gens:
                parts.append(f"[{coeff}]")
            else:
                parts.append(f"[{coeff}] " + "∧".join(gens))
        if max_terms and len(items) > max_terms:
            parts.append(f"... ({len(items) - max_terms} more monomials)")
        return " + ".join(parts)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"Form({self.to_text(max_terms=8)})"


def _as_form(x, ring=None) -> Form:
    if isinstance(x, Form):
        return x
    if isinstance(x, JetScalar):
        return Form.scalar(x)
    raise TypeError(f"expected Form or JetScalar, got {type(x).__name__}")


def wedge(alpha, beta) -> Form:
    """Graded-commutative product; vertical factors are moved in front of horizontal ones."""
    alpha, beta = _as_form(alpha), _as_form(beta)
    alpha._check(beta)
    ring = alpha.ring
    acc = _Acc(ring)
    for (v1, h1), c1 in alpha.terms.items():
        for (v2, h2), c2 in beta.terms.items():
            if len(h1) + len(h2) > ring.n:
                continue
            sign = -1 if (len(h1) * len(v2)) % 2 else 1
            sv, v = _merge_sorted(v1 + v2)
            if not sv:
                continue
            sh, h = _merge_sorted(h1 + h2)
            if not sh:
                continue
            acc.add((v, h), c1 * c2, sign * sv * sh)
    return acc.form()


def vertical_differential(alpha) -> Form:
    """δ: raises vertical degree by one; δ of every generator vanishes."""
    alpha = _as_form(alpha)
    acc = _Acc(alpha.ring)
    for (v, h), c in alpha.terms.items():
        for y, dc in c.fibre_gradient().items():
            if y in v:
                continue
            sign, vs = _merge_sorted((y,) + v)
            acc.add((vs, h), dc, sign)
    return acc.form()


def lie_total_derivative(alpha, e: int) -> Form:
    """Lie derivative along the Cartan lift of ``d/dx^e``.

    Acts as the total derivative on coefficients, shifts ``δy_C -> δy_{Ce}`` and
    kills ``dx``.
    """
    alpha = _as_form(alpha)
    ring = alpha.ring
    acc = _Acc(ring)
    for (v, h), c in alpha.terms.items():
        dc = c.total_derivative(e)
        if not dc.is_zero():
            acc.add((v, h), dc)
        for j, y in enumerate(v):
            shifted = ring.shift(y, e)
            ring.var_index(shifted)
            if shifted in v:
                continue
            acc.add_raw(v[:j] + (shifted,) + v[j + 1:], h, c)
    return acc.form()


def horizontal_differential(alpha) -> Form:
    """d ω = (-1)^{p+q} Σ_e (L_{∂̂_e} ω) ∧ dx^e."""
    alpha = _as_form(alpha)
    ring = alpha.ring
    acc = _Acc(ring)
    for e in range(1, ring.n + 1):
        lie = lie_total_derivative(alpha, e)
        for (v, h), c in lie.terms.items():
            if e in h:
                continue
            sign = -1 if (len(v) + len(h)) % 2 else 1
            sh, hs = _merge_sorted(h + (e,))
            acc.add((v, hs), c, sign * sh)
    return acc.form()


def total_differential(alpha) -> Form:
    """The full de Rham differential ``𝐝 = δ + d``."""
    alpha = _as_form(alpha)
    return vertical_differential(alpha) + horizontal_differential(alpha)


def interior_product(X, alpha) -> Form:
    """ι_X as a graded derivation of degree -1 (vertical generators come first)."""
    alpha = _as_form(alpha)
    ring = alpha.ring
    acc = _Acc(ring)
    horiz = X.horizontal
    for (v, h), c in alpha.terms.items():
        p = len(v)
        if v and X.has_vertical:
            for j, y in enumerate(v):
                img = X.vertical_image(ring, y)
                if img is None or img.is_zero():
                    continue
                acc.add((v[:j] + v[j + 1:], h), c * img, -1 if j % 2 else 1)
        if h and horiz is not None:
            base = -1 if p % 2 else 1
            for j, a in enumerate(h):
                va = horiz[a - 1]
                if va.is_zero():
                    continue
                acc.add((v, h[:j] + h[j + 1:]), c * va, base * (-1 if j % 2 else 1))
    return acc.form()


def lie_derivative(X, alpha) -> Form:
    """Cartan formula ``ι_X 𝐝 + 𝐝 ι_X``.

    For strictly vertical X this reduces to ``ι_X δ + δ ι_X``, for strictly
    horizontal X to ``ι_X d + d ι_X``; the general formula is used unless the
    field declares itself strict.
    """
    alpha = _as_form(alpha)
    kind = getattr(X, "strict_kind", None)
    if kind == "vertical":
        return interior_product(X, vertical_differential(alpha)) + vertical_differential(interior_product(X, alpha))
    if kind == "horizontal":
        return interior_product(X, horizontal_differential(alpha)) + horizontal_differential(interior_product(X, alpha))
    return interior_product(X, total_differential(alpha)) + total_differential(interior_product(X, alpha))


def coordinate_volume(ring: JetRing) -> Form:
    """``dx^1 ∧ ... ∧ dx^n`` with unit coefficient."""
    return Form.dx(ring, *range(1, ring.n + 1))


def euler_operator(alpha) -> Form:
    """Interior Euler operator on (1, n)-forms.

    ``P(Σ_C c^{y,C} δy_C ∧ dx^{1..n}) = Σ_y (Σ_C (-1)^{|C|} ∂̂_C c^{y,C}) δy ∧ dx^{1..n}``.
    """
    alpha = _as_form(alpha)
    ring = alpha.ring
    top = tuple(range(1, ring.n + 1))
    if alpha.is_zero():
        return alpha
    if alpha.bidegrees() != {(1, ring.n)}:
        raise ValueError(f"euler operator needs a (1,{ring.n})-form, got bidegrees {sorted(alpha.bidegrees())}")
    acc = _Acc(ring)
    for (v, h), c in alpha.terms.items():
        (y,) = v
        assert h == top
        integrated = c.total_derivative_multi(y.order)
        base = y._replace(order=type(y.order).zero(ring.n))
        acc.add(((base,), top), integrated, -1 if y.order.length % 2 else 1)
    return acc.form()
