"""Exact scalar algebra on the infinite jet bundle.

A :class:`JetScalar` is a rational function of the form ``(A + B*s) / det(g)**m``
where ``A`` and ``B`` are polynomials with rational coefficients in the jet
coordinates, ``s = sqrt(-det g)`` and ``m >= 0``.  The inverse metric never
appears as a generator; it is expressed through the adjugate.  Numerators are
``flint.fmpq_mpoly`` polynomials living in a context that grows on demand.

Indices are 1-based throughout, matching the usual notation ``g_{ab,C}``.
"""
from __future__ import annotations

import itertools
import threading
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

import flint
from flint.utils.flint_exceptions import DomainError

__all__ = [
    "JetOrderError",
    "DimensionMismatch",
    "MultiIndex",
    "JetCoord",
    "FibreSchema",
    "MetricSchema",
    "ParticleSchema",
    "JetRing",
    "JetScalar",
    "metric_ring",
    "particle_ring",
]

MAX_DIM = 4


class JetOrderError(ValueError):
    """Raised when a derivative would exceed the configured jet-order cap."""


class DimensionMismatch(ValueError):
    pass


class MultiIndex(tuple):
    """Counts ``(C_1, ..., C_n)`` of partial derivatives in each base direction."""

    __slots__ = ()

    @classmethod
    def zero(cls, n: int) -> "MultiIndex":
        return cls((0,) * n)

    @classmethod
    def from_directions(cls, n: int, dirs: Iterable[int]) -> "MultiIndex":
        counts = [0] * n
        for d in dirs:
            if not 1 <= d <= n:
                raise IndexError(f"direction {d} out of range 1..{n}")
            counts[d - 1] += 1
        return cls(counts)

    @classmethod
    def coerce(cls, n: int, spec) -> "MultiIndex":
        """Accept a MultiIndex, a string of directions (``"112"``) or a sequence of directions."""
        if spec is None:
            return cls.zero(n)
        if isinstance(spec, MultiIndex):
            if len(spec) != n:
                raise DimensionMismatch(f"multi-index {tuple(spec)} has length {len(spec)}, expected {n}")
            return spec
        if isinstance(spec, str):
            return cls.from_directions(n, (int(ch) for ch in spec))
        return cls.from_directions(n, spec)

    def concat(self, d: int) -> "MultiIndex":
        counts = list(self)
        counts[d - 1] += 1
        return MultiIndex(counts)

    def minus(self, d: int) -> "MultiIndex":
        counts = list(self)
        if counts[d - 1] == 0:
            raise ValueError("cannot remove a direction that is not present")
        counts[d - 1] -= 1
        return MultiIndex(counts)

    @property
    def length(self) -> int:
        return sum(self)

    def directions(self) -> tuple[int, ...]:
        return tuple(d + 1 for d, c in enumerate(self) for _ in range(c))

    def __repr__(self) -> str:
        return f"MultiIndex{tuple(self)}"


class JetCoord(NamedTuple):
    """A coordinate on the jet space.

    ``kind`` is ``"fibre"`` (field jets such as ``g_{ab,C}``), ``"vsym"`` (the
    formal components ``d_C v^a`` of a spacetime vector field) or ``"base"``
    (the spacetime coordinate ``x^a``).
    """

    kind: str
    label: str
    comp: tuple
    order: MultiIndex

    @property
    def jet_order(self) -> int:
        return self.order.length if self.order else 0


class FibreSchema:
    """Names the fibre coordinates of a configuration bundle."""

    field = "?"
    metric = False

    def __init__(self, n: int, components: Sequence[tuple]):
        if not 1 <= n <= MAX_DIM:
            raise ValueError(f"dimension must be in 1..{MAX_DIM}, got {n}")
        self.n = n
        self.components = tuple(components)

    def canonical(self, comp: tuple) -> tuple:
        return tuple(comp)

    def key(self):
        return (type(self).__name__, self.n, self.components)

    def symbol(self, comp: tuple, order: MultiIndex) -> str:
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, FibreSchema) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())


class MetricSchema(FibreSchema):
    """Symmetric metric components ``g_{ab}``, ``a <= b``."""

    field = "g"
    metric = True

    def __init__(self, n: int):
        super().__init__(n, [(a, b) for a in range(1, n + 1) for b in range(a, n + 1)])

    def canonical(self, comp):
        a, b = comp
        if not (1 <= a <= self.n and 1 <= b <= self.n):
            raise IndexError(f"metric index ({a},{b}) out of range 1..{self.n}")
        return (a, b) if a <= b else (b, a)

    def symbol(self, comp, order):
        dirs = "".join(str(d) for d in order.directions())
        return f"g_{{{comp[0]}{comp[1]}{',' + dirs if dirs else ''}}}"


class ParticleSchema(FibreSchema):
    """Configuration coordinates ``q^i`` over a one-dimensional base (time)."""

    field = "q"

    def __init__(self, m: int):
        if m < 1:
            raise ValueError("need at least one configuration coordinate")
        super().__init__(1, [(i,) for i in range(1, m + 1)])
        self.m = m

    def canonical(self, comp):
        (i,) = comp
        if not 1 <= i <= self.m:
            raise IndexError(f"particle index {i} out of range 1..{self.m}")
        return (i,)

    def symbol(self, comp, order):
        dirs = "".join(str(d) for d in order.directions())
        return f"q^{comp[0]}" + (f"_{{,{dirs}}}" if dirs else "")


def _det_expr(matrix):
    """Cofactor expansion; fine for n <= 4."""
    size = len(matrix)
    if size == 1:
        return matrix[0][0]
    total = 0
    for j in range(size):
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        term = matrix[0][j] * _det_expr(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


class JetRing:
    """Coefficient ring for one configuration bundle and one pair of jet caps.

    Variables are allocated lazily; the underlying flint context doubles in size
    when it runs out of generators, and polynomials are projected forward on use.
    """

    def __init__(self, schema: FibreSchema, jet_cap: int = 6, vsym_cap: int = 5):
        if jet_cap < 1 or vsym_cap < 1:
            raise ValueError("caps must be positive")
        self.schema = schema
        self.n = schema.n
        self.jet_cap = jet_cap
        self.vsym_cap = vsym_cap
        self._lock = threading.RLock()
        self._keys: list[JetCoord] = []
        self._index: dict[JetCoord, int] = {}
        self._capacity = 0
        self._ctx = None
        self._gens: list = []
        self._grow(64)
        self._zero_mi = MultiIndex.zero(self.n)
        if schema.metric:
            self._setup_metric()

    # -- variables -----------------------------------------------------
    def _grow(self, capacity: int) -> None:
        names = [f"y{i}" for i in range(capacity)]
        self._ctx = flint.fmpq_mpoly_ctx.get(names, "lex")
        self._gens = list(self._ctx.gens())
        self._capacity = capacity
        self._cached_polys: dict = {}

    @property
    def ctx(self):
        return self._ctx

    @property
    def keys(self) -> tuple[JetCoord, ...]:
        return tuple(self._keys)

    def key_of(self, i: int) -> JetCoord:
        return self._keys[i]

    def var_index(self, coord: JetCoord) -> int:
        i = self._index.get(coord)
        if i is not None:
            return i
        with self._lock:
            i = self._index.get(coord)
            if i is not None:
                return i
            self._validate(coord)
            if len(self._keys) >= self._capacity:
                self._grow(self._capacity * 2)
            i = len(self._keys)
            self._keys.append(coord)
            self._index[coord] = i
            return i

    def gen(self, coord: JetCoord):
        i = self.var_index(coord)
        return self._gens[i]

    def sync(self, poly):
        """Project a numerator polynomial into the current context."""
        if poly.context() is self._ctx:
            return poly
        return poly.project_to_context(self._ctx)

    def _validate(self, coord: JetCoord) -> None:
        if coord.kind == "fibre":
            if coord.order.length > self.jet_cap:
                raise JetOrderError(
                    f"jet order {coord.order.length} of {self.schema.symbol(coord.comp, coord.order)} "
                    f"exceeds cap {self.jet_cap}")
        elif coord.kind == "vsym":
            if coord.order.length > self.vsym_cap:
                raise JetOrderError(
                    f"derivative order {coord.order.length} of vector field {coord.label} exceeds cap {self.vsym_cap}")
        elif coord.kind != "base":
            raise ValueError(f"unknown coordinate kind {coord.kind!r}")

    # -- coordinate constructors ---------------------------------------
    def fibre_coord(self, comp, order=None) -> JetCoord:
        comp = self.schema.canonical(tuple(comp))
        return JetCoord("fibre", self.schema.field, comp, MultiIndex.coerce(self.n, order))

    def vsym_coord(self, label: str, a: int, order=None) -> JetCoord:
        if not 1 <= a <= self.n:
            raise IndexError(f"vector index {a} out of range 1..{self.n}")
        if not label or not label[0].isalpha() or label == "x":
            raise ValueError(f"invalid vector-field label {label!r}")
        return JetCoord("vsym", label, (a,), MultiIndex.coerce(self.n, order))

    def base_coord(self, a: int) -> JetCoord:
        if not 1 <= a <= self.n:
            raise IndexError(f"base index {a} out of range 1..{self.n}")
        return JetCoord("base", "x", (a,), self._zero_mi)

    def coord(self, c: JetCoord) -> "JetScalar":
        return JetScalar(self, self.gen(c), self._ctx.from_dict({}), 0)

    def g(self, a: int, b: int, order=None) -> "JetScalar":
        if not self.schema.metric:
            raise TypeError("g is only defined on the metric bundle")
        return self.coord(self.fibre_coord((a, b), order))

    def q(self, i: int, order=None) -> "JetScalar":
        if not isinstance(self.schema, ParticleSchema):
            raise TypeError("q is only defined on the particle bundle")
        return self.coord(self.fibre_coord((i,), order))

    def vsym(self, label: str, a: int, order=None) -> "JetScalar":
        return self.coord(self.vsym_coord(label, a, order))

    def x(self, a: int) -> "JetScalar":
        return self.coord(self.base_coord(a))

    def const(self, value) -> "JetScalar":
        value = Fraction(value)
        poly = self._ctx.from_dict({(0,) * self._capacity: flint.fmpq(value.numerator, value.denominator)}) \
            if value else self._ctx.from_dict({})
        return JetScalar(self, poly, self._ctx.from_dict({}), 0)

    @property
    def zero(self) -> "JetScalar":
        return self.const(0)

    @property
    def one(self) -> "JetScalar":
        return self.const(1)

    # -- metric data -----------------------------------------------------
    def _setup_metric(self) -> None:
        n = self.n
        mat = [[self.gen(self.fibre_coord((a, b))) for b in range(1, n + 1)] for a in range(1, n + 1)]
        self._det_src = _det_expr(mat)
        adj = [[None] * n for _ in range(n)]
        for a in range(n):
            for b in range(n):
                if n == 1:
                    adj[a][b] = self._ctx.from_dict({(0,) * self._capacity: 1})
                    continue
                minor = [[mat[r][c] for c in range(n) if c != a] for r in range(n) if r != b]
                cof = _det_expr(minor)
                adj[a][b] = cof if (a + b) % 2 == 0 else -cof
        self._adj_src = adj

    def det_poly(self):
        if not self.schema.metric:
            return None
        key = "det"
        p = self._cached_polys.get(key)
        if p is None:
            p = self.sync(self._det_src)
            self._cached_polys[key] = p
        return p

    def det_power(self, k: int):
        key = ("detpow", k)
        p = self._cached_polys.get(key)
        if p is None:
            p = self.det_poly() ** k if k else self._ctx.from_dict({(0,) * self._capacity: 1})
            self._cached_polys[key] = p
        return p

    def adj_poly(self, a: int, b: int):
        key = ("adj", a, b)
        p = self._cached_polys.get(key)
        if p is None:
            p = self.sync(self._adj_src[a - 1][b - 1])
            self._cached_polys[key] = p
        return p

    def det_g(self) -> "JetScalar":
        return JetScalar(self, self.det_poly(), self._ctx.from_dict({}), 0)

    @property
    def s(self) -> "JetScalar":
        """The volume density ``sqrt(-det g)``."""
        if not self.schema.metric:
            raise TypeError("s is only defined on the metric bundle")
        ctx = self._ctx
        return JetScalar(self, ctx.from_dict({}), ctx.from_dict({(0,) * self._capacity: 1}), 0)

    def inverse_metric(self, a: int, b: int) -> "JetScalar":
        """``g^{ab} = adj(g)^{ab} / det g``."""
        if not self.schema.metric:
            raise TypeError("inverse metric needs the metric bundle")
        if not (1 <= a <= self.n and 1 <= b <= self.n):
            raise IndexError(f"index ({a},{b}) out of range 1..{self.n}")
        return JetScalar(self, self.adj_poly(a, b), self._ctx.from_dict({}), 1)._normalized()

    # -- derivatives of polynomials ----------------------------------------
    def shift(self, coord: JetCoord, e: int):
        """Image of a coordinate under the total derivative in direction ``e``.

        Returns a JetCoord, or an int constant (for base coordinates).
        """
        if coord.kind == "base":
            return 1 if coord.comp[0] == e else 0
        new = coord._replace(order=coord.order.concat(e))
        self._validate(new)
        return new

    def present_vars(self, poly) -> list[int]:
        if poly.is_zero():
            return []
        return [i for i, d in enumerate(poly.degrees()) if d]

    def total_derivative_poly(self, poly, e: int):
        poly = self.sync(poly)
        images = []
        for i in self.present_vars(poly):
            img = self.shift(self._keys[i], e)
            if img == 0:
                continue
            # allocate first: growing the context invalidates live polynomials
            images.append((i, None if img == 1 else self.var_index(img)))
        poly = self.sync(poly)
        result = self._ctx.from_dict({})
        for i, img in images:
            dp = poly.derivative(i)
            result += dp if img is None else dp * self._gens[img]
        return result

    def total_derivative_det(self, e: int):
        key = ("ddet", e)
        p = self._cached_polys.get(key)
        if p is None:
            p = self.total_derivative_poly(self.det_poly(), e)
            self._cached_polys[key] = self.sync(p)
            p = self._cached_polys[key]
        return p

    def __repr__(self):
        return (f"JetRing({type(self.schema).__name__}, n={self.n}, jet_cap={self.jet_cap}, "
                f"vsym_cap={self.vsym_cap})")


@lru_cache(maxsize=None)
def metric_ring(n: int, jet_cap: int = 6, vsym_cap: int = 5) -> JetRing:
    """Shared ring for lorentzian metrics in dimension ``n``."""
    return JetRing(MetricSchema(n), jet_cap, vsym_cap)


@lru_cache(maxsize=None)
def particle_ring(m: int, jet_cap: int = 6, vsym_cap: int = 5) -> JetRing:
    return JetRing(ParticleSchema(m), jet_cap, vsym_cap)


def _to_fmpq(value):
    value = Fraction(value)
    return flint.fmpq(value.numerator, value.denominator)


class JetScalar:
    """Canonical value ``(A + B*s) / det(g)**m``; immutable."""

    __slots__ = ("ring", "_a", "_b", "m")

    def __init__(self, ring: JetRing, a, b, m: int):
        self.ring = ring
        self._a = a
        self._b = b
        self.m = m

    # -- canonical form ----------------------------------------------------
    def _synced(self):
        ring = self.ring
        a, b = self._a, self._b
        if a.context() is not ring._ctx:
            a = ring.sync(a)
            self._a = a
        if b.context() is not ring._ctx:
            b = ring.sync(b)
            self._b = b
        return a, b

    @property
    def numerator(self):
        """``(A, B)`` in the ring's current context."""
        return self._synced()

    def _normalized(self) -> "JetScalar":
        a, b = self._synced()
        m = self.m
        if a.is_zero() and b.is_zero():
            self.m = 0
            return self
        if m and self.ring.schema.metric:
            det = self.ring.det_poly()
            while m:
                try:
                    qa = a / det if not a.is_zero() else a
                    qb = b / det if not b.is_zero() else b
                except (DomainError, ValueError, ZeroDivisionError):
                    break
                a, b, m = qa, qb, m - 1
        self._a, self._b, self.m = a, b, m
        return self

    def _check(self, other: "JetScalar") -> None:
        if other.ring is not self.ring:
            raise DimensionMismatch(f"cannot combine scalars from {self.ring!r} and {other.ring!r}")

    def _coerce(self, other) -> "JetScalar":
        if isinstance(other, JetScalar):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return JetScalar.sum([self, other], self.ring)

    __radd__ = __add__

    def __neg__(self):
        a, b = self._synced()
        return JetScalar(self.ring, -a, -b, self.m)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return JetScalar.sum([self, -other], self.ring)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return self.ring.zero
            c = _to_fmpq(other)
            a, b = self._synced()
            return JetScalar(self.ring, a * c, b * c, self.m)
        if not isinstance(other, JetScalar):
            return NotImplemented
        self._check(other)
        a1, b1 = self._synced()
        a2, b2 = other._synced()
        ring = self.ring
        if b1.is_zero() and b2.is_zero():
            a, b = a1 * a2, b1
        elif b1.is_zero():
            a, b = a1 * a2, a1 * b2
        elif b2.is_zero():
            a, b = a1 * a2, b1 * a2
        else:
            # s^2 = -det g
            a = a1 * a2 - ring.det_poly() * (b1 * b2)
            b = a1 * b2 + b1 * a2
        return JetScalar(ring, a, b, self.m + other.m)._normalized()

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * (1 / Fraction(other))
        if isinstance(other, JetScalar):
            self._check(other)
            a, b = other._synced()
            if b.is_zero() and a.is_constant() and not a.is_zero():
                c = a.leading_coefficient()
                return self * Fraction(int(c.p), int(c.q)) ** -1 * _det_power_scalar(self.ring, other.m)
            if self.ring.schema.metric and b.is_zero() and other.m == 0:
                det = self.ring.det_poly()
                # exact division by a power of det g
                k, rest = 0, a
                while not rest.is_constant():
                    try:
                        rest = rest / det
                    except (DomainError, ValueError):
                        break
                    k += 1
                if rest.is_constant() and not rest.is_zero():
                    c = rest.leading_coefficient()
                    sa, sb = self._synced()
                    inv = flint.fmpq(c.q, c.p)
                    return JetScalar(self.ring, sa * inv, sb * inv, self.m + k)._normalized()
        raise ZeroDivisionError("JetScalar division is only defined by nonzero constants and powers of det g")

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = self.ring.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    @staticmethod
    def sum(items: Iterable["JetScalar"], ring: JetRing | None = None) -> "JetScalar":
        """Add many scalars with a single normalisation pass."""
        groups: dict[int, list] = {}
        for it in items:
            if ring is None:
                ring = it.ring
            elif it.ring is not ring:
                raise DimensionMismatch("cannot add scalars from different rings")
            a, b = it._synced()
            acc = groups.get(it.m)
            if acc is None:
                groups[it.m] = [a, b]
            else:
                acc[0] = acc[0] + a
                acc[1] = acc[1] + b
        if ring is None:
            raise ValueError("empty sum needs an explicit ring")
        if not groups:
            return ring.zero
        top = max(groups)
        ctx = ring._ctx
        a_tot = ctx.from_dict({})
        b_tot = ctx.from_dict({})
        for m, (a, b) in groups.items():
            if m != top:
                factor = ring.det_power(top - m)
                a, b = a * factor, b * factor
            a_tot += ring.sync(a)
            b_tot += ring.sync(b)
        return JetScalar(ring, a_tot, b_tot, top)._normalized()

    # -- predicates ------------------------------------------------------
    def is_zero(self) -> bool:
        a, b = self._synced()
        return a.is_zero() and b.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def is_constant(self) -> bool:
        a, b = self._synced()
        return b.is_zero() and a.is_constant() and self.m == 0

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        a, _ = self._synced()
        if a.is_zero():
            return Fraction(0)
        c = a.leading_coefficient()
        return Fraction(int(c.p), int(c.q))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, JetScalar):
            return NotImplemented
        if other.ring is not self.ring:
            return False
        a1, b1 = self._synced()
        a2, b2 = other._synced()
        return self.m == other.m and a1 == a2 and b1 == b2

    __hash__ = None

    def has_s(self) -> bool:
        return not self._synced()[1].is_zero()

    def nterms(self) -> int:
        a, b = self._synced()
        return len(a) + len(b)

    # -- calculus --------------------------------------------------------
    def coords(self) -> set[JetCoord]:
        """Coordinates the value depends on (including through det g and s)."""
        a, b = self._synced()
        ring = self.ring
        found = {ring.key_of(i) for i in ring.present_vars(a)}
        found |= {ring.key_of(i) for i in ring.present_vars(b)}
        if ring.schema.metric and (self.m or not b.is_zero()):
            found |= {ring.fibre_coord(c) for c in ring.schema.components}
        return found

    def jet_order(self) -> int:
        orders = [c.order.length for c in self.coords() if c.kind == "fibre"]
        return max(orders, default=0)

    def _differentiate(self, dpoly, ddet) -> "JetScalar":
        """Shared quotient-rule step; ``dpoly`` differentiates numerators, ``ddet`` is D(det)."""
        a, b = self._synced()
        ring = self.ring
        da, db = dpoly(a), dpoly(b)
        a, b = self._synced()
        if ddet is None or ddet.is_zero() or (self.m == 0 and b.is_zero()):
            return JetScalar(ring, ring.sync(da), ring.sync(db), self.m)._normalized()
        det = ring.det_poly()
        m = self.m
        ddet = ring.sync(ddet)
        new_a = ring.sync(da) * det - a * ddet * m if m else ring.sync(da) * det
        new_b = ring.sync(db) * det - b * ddet * m + b * ddet * flint.fmpq(1, 2)
        return JetScalar(ring, new_a, new_b, m + 1)._normalized()

    def partial(self, coord: JetCoord) -> "JetScalar":
        """Partial derivative with respect to one jet coordinate."""
        ring = self.ring
        i = ring.var_index(coord)
        ddet = None
        if ring.schema.metric and coord.kind == "fibre" and coord.order.length == 0:
            ddet = ring.det_poly().derivative(i)
        return self._differentiate(lambda p: ring.sync(p).derivative(i), ddet)

    def fibre_gradient(self) -> dict[JetCoord, "JetScalar"]:
        """``{y: df/dy}`` over fibre coordinates ``y`` with a nonzero derivative."""
        grad = {}
        for c in sorted(self.coords()):
            if c.kind != "fibre":
                continue
            d = self.partial(c)
            if not d.is_zero():
                grad[c] = d
        return grad

    def total_derivative(self, e: int) -> "JetScalar":
        """The total derivative along the Cartan lift of the coordinate field ``d/dx^e``."""
        ring = self.ring
        if not 1 <= e <= ring.n:
            raise IndexError(f"direction {e} out of range 1..{ring.n}")
        ddet = ring.total_derivative_det(e) if ring.schema.metric else None
        return self._differentiate(lambda p: ring.total_derivative_poly(p, e), ddet)

    def total_derivative_multi(self, order) -> "JetScalar":
        out = self
        for d in MultiIndex.coerce(self.ring.n, order).directions():
            out = out.total_derivative(d)
        return out

    # -- printing ----------------------------------------------------------
    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        return f"JetScalar({format_scalar(self)})"


def _det_power_scalar(ring: JetRing, k: int) -> JetScalar:
    if k == 0:
        return ring.one
    return JetScalar(ring, ring.det_power(k), ring.ctx.from_dict({}), 0)


# -- text format --------------------------------------------------------

def coord_symbol(ring: JetRing, c: JetCoord) -> str:
    if c.kind == "fibre":
        return ring.schema.symbol(c.comp, c.order)
    if c.kind == "base":
        return f"x^{c.comp[0]}"
    dirs = "".join(str(d) for d in c.order.directions())
    return (f"∂_{{{dirs}}}" if dirs else "") + f"{c.label}^{c.comp[0]}"


def _format_poly(ring: JetRing, poly, extra: str = "") -> list[str]:
    pieces = []
    keys = ring._keys
    for exps, coeff in _sorted_terms(ring, poly):
        factors = []
        for i, e in exps:
            sym = coord_symbol(ring, keys[i])
            factors.append(sym if e == 1 else f"{sym}^{e}")
        if extra:
            factors.append(extra)
        c = Fraction(int(coeff.p), int(coeff.q))
        if not factors:
            pieces.append(str(c))
        elif c == 1:
            pieces.append("*".join(factors))
        elif c == -1:
            pieces.append("-" + "*".join(factors))
        else:
            pieces.append(f"{c}*" + "*".join(factors))
    return pieces


def _sorted_terms(ring: JetRing, poly):
    """Terms keyed by coordinate order, so printing does not depend on allocation order."""
    keys = ring._keys
    out = []
    for exps, coeff in poly.terms():
        sparse = [(i, e) for i, e in enumerate(exps) if e]
        sparse.sort(key=lambda t: keys[t[0]])
        out.append((sparse, coeff))
    out.sort(key=lambda t: (-sum(e for _, e in t[0]), [(keys[i], -e) for i, e in t[0]]))
    return out


def format_scalar(f: JetScalar) -> str:
    ring = f.ring
    a, b = f._synced()
    pieces = _format_poly(ring, a) + _format_poly(ring, b, "s")
    if not pieces:
        return "0"
    body = pieces[0]
    for p in pieces[1:]:
        body += (" - " + p[1:]) if p.startswith("-") else (" + " + p)
    if f.m:
        power = "" if f.m == 1 else f"^{f.m}"
        return f"({body})/det(g){power}"
    return body


def product_of(items: Iterable[JetScalar], ring: JetRing) -> JetScalar:
    out = ring.one
    for it in items:
        out = out * it
    return out


def all_multi_indices(n: int, max_order: int) -> list[MultiIndex]:
    out = []
    for k in range(max_order + 1):
        for combo in itertools.combinations_with_replacement(range(1, n + 1), k):
            out.append(MultiIndex.from_directions(n, combo))
    return out
