"""Randomised exact evaluation of jet scalars and forms (polynomial identity testing).

A :class:`JetPoint` assigns rationals to jet coordinates on demand.  Values
are derived from ``(seed, coordinate)`` alone, so the same point is
reproduced regardless of the order in which coordinates are requested.
"""
from __future__ import annotations

import math
import random
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import flint

from .formalg import Form
from .jetscalar import JetCoord, JetRing, JetScalar, MultiIndex

__all__ = [
    "JetPoint",
    "OracleVerdict",
    "SamplingError",
    "sample_jet_point",
    "evaluate",
    "evaluate_reference",
    "evaluate_form",
    "probabilistic_is_zero",
    "forms_agree",
]

MAX_RESAMPLE = 64
NUM_BOUND = 9
DEN_BOUND = 7


class SamplingError(RuntimeError):
    pass


def _is_square(q: Fraction) -> bool:
    if q < 0:
        return False
    r1, r2 = math.isqrt(q.numerator), math.isqrt(q.denominator)
    return r1 * r1 == q.numerator and r2 * r2 == q.denominator


def _det(mat):
    size = len(mat)
    if size == 1:
        return mat[0][0]
    total = Fraction(0)
    for j in range(size):
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = mat[0][j] * _det(minor)
        total += term if j % 2 == 0 else -term
    return total


def _poly_derivative_at(coeffs: dict, order: tuple, x0: tuple) -> Fraction:
    """Evaluate ``∂^order`` of ``Σ c_e x^e`` at ``x0``."""
    total = Fraction(0)
    for exps, c in coeffs.items():
        term = Fraction(c)
        for e, k, x in zip(exps, order, x0):
            if k > e:
                term = Fraction(0)
                break
            term *= math.perm(e, k) * x ** (e - k)
        total += term
    return total


class JetPoint:
    """A lazily populated exact point of the jet space."""

    def __init__(self, ring: JetRing, seed: int, forced: str | None = None, field_degree: int = 3):
        self.ring = ring
        self.seed = seed
        self.forced = forced
        self.field_degree = field_degree
        self._values: dict[JetCoord, Fraction] = {}
        self._fields: dict[str, list] = {}
        self._lock = threading.Lock()
        self._vector: list = []
        self._filled: set[int] = set()
        self.x0 = tuple(self._rational(f"x0:{a}") for a in range(1, ring.n + 1))
        self._fix_zero_jets()

    def _rng(self, tag: str) -> random.Random:
        return random.Random(f"{self.seed}:{tag}")

    def _rational(self, tag: str) -> Fraction:
        rng = self._rng(tag)
        num = rng.randint(-NUM_BOUND, NUM_BOUND)
        return Fraction(num, rng.randint(1, DEN_BOUND))

    def _fix_zero_jets(self) -> None:
        ring = self.ring
        zero = MultiIndex.zero(ring.n)
        self.det = None
        if not ring.schema.metric:
            return
        n = ring.n
        if self.forced == "minkowski":
            diag = [Fraction(-1)] + [Fraction(1)] * (n - 1)
            for a, b in ring.schema.components:
                self._values[ring.fibre_coord((a, b), zero)] = diag[a - 1] if a == b else Fraction(0)
            self.det = _det([[diag[i] if i == j else Fraction(0) for j in range(n)] for i in range(n)])
            return
        for attempt in range(MAX_RESAMPLE):
            rng = self._rng(f"metric:{attempt}")
            P = [[Fraction(rng.randint(-3, 3)) for _ in range(n)] for _ in range(n)]
            for i in range(n):
                P[i][i] += rng.choice((-4, 4))
            if _det(P) == 0:
                continue
            diag = [Fraction(-rng.randint(1, 9), rng.randint(1, 5))]
            diag += [Fraction(rng.randint(1, 9), rng.randint(1, 5)) for _ in range(n - 1)]
            # g = P^T diag P has one negative eigenvalue direction by Sylvester's law of inertia
            g = [[sum(P[k][i] * diag[k] * P[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
            det = _det(g)
            if det >= 0 or _is_square(-det):
                continue
            for a, b in ring.schema.components:
                self._values[ring.fibre_coord((a, b), zero)] = g[a - 1][b - 1]
            self.det = det
            return
        raise SamplingError(f"no admissible metric after {MAX_RESAMPLE} draws (seed {self.seed})")

    def _field(self, label: str):
        hit = self._fields.get(label)
        if hit is None:
            n = self.ring.n
            comps = []
            for a in range(1, n + 1):
                rng = self._rng(f"field:{label}:{a}")
                coeffs = {}
                for exps in _monomials(n, self.field_degree):
                    c = rng.randint(-NUM_BOUND, NUM_BOUND)
                    if c:
                        coeffs[exps] = Fraction(c, rng.randint(1, DEN_BOUND))
                comps.append(coeffs)
            hit = comps
            self._fields[label] = hit
        return hit

    def value(self, coord: JetCoord) -> Fraction:
        hit = self._values.get(coord)
        if hit is not None:
            return hit
        if coord.kind == "fibre":
            if self.forced == "minkowski" and self.ring.schema.metric and coord.order.length:
                val = Fraction(0)
            else:
                comp = ",".join(map(str, coord.comp))
                order = ",".join(map(str, coord.order))
                val = self._rational(f"fibre:{comp}:{order}")
        elif coord.kind == "base":
            val = self.x0[coord.comp[0] - 1]
        else:
            comps = self._field(coord.label)
            val = _poly_derivative_at(comps[coord.comp[0] - 1], tuple(coord.order), self.x0)
        with self._lock:
            self._values[coord] = val
        return val

    def s_squared(self) -> Fraction:
        return -self.det

    def field_components(self, label: str) -> list[dict]:
        """The concrete polynomial standing in for a formal field (exponent tuple -> coefficient)."""
        return self._field(label)

    def describe(self) -> dict:
        """Zero-jet values for failure reports."""
        zero = MultiIndex.zero(self.ring.n)
        out = {"seed": self.seed}
        for comp in self.ring.schema.components:
            c = self.ring.fibre_coord(comp, zero)
            out[f"{comp}"] = str(self.value(c))
        return out


def _monomials(n: int, degree: int):
    def rec(i, left):
        if i == n:
            yield ()
            return
        for e in range(left + 1):
            for rest in rec(i + 1, left - e):
                yield (e,) + rest
    return list(rec(0, degree))


def sample_jet_point(ring: JetRing, seed: int, forced: str | None = None) -> JetPoint:
    """Deterministic point; metric zero-jets are lorentzian with ``-det g`` not a rational square."""
    return JetPoint(ring, seed, forced)


def _point_vector(ring: JetRing, point: JetPoint, present: Iterable[int]):
    """Values for every generator of the ring's current context (unused slots stay 0)."""
    nvars = ring.ctx.nvars()
    vals = point._vector
    if len(vals) < nvars:
        vals.extend([flint.fmpq(0)] * (nvars - len(vals)))
    keys = ring.keys
    filled = point._filled
    for i in present:
        if i not in filled:
            v = point.value(keys[i])
            vals[i] = flint.fmpq(v.numerator, v.denominator)
            filled.add(i)
    return vals[:nvars] if len(vals) > nvars else vals


def _to_fraction(x) -> Fraction:
    return Fraction(int(x.p), int(x.q))


def evaluate(f: JetScalar, point: JetPoint) -> tuple[Fraction, Fraction]:
    """Value of ``f`` at ``point`` as ``(a, b)`` meaning ``a + b*s``."""
    if point.ring is not f.ring:
        raise ValueError("point and scalar live on different jet rings")
    ring = f.ring
    A, B = f.numerator
    present = set(ring.present_vars(A)) | set(ring.present_vars(B))
    for c in f.coords():
        if c.kind == "fibre" and c.order.length > ring.jet_cap:
            raise ValueError("scalar exceeds the point's jet cap")
    vals = _point_vector(ring, point, present)
    a = _to_fraction(A(*vals)) if not A.is_zero() else Fraction(0)
    b = _to_fraction(B(*vals)) if not B.is_zero() else Fraction(0)
    if f.m:
        den = point.det ** f.m
        a, b = a / den, b / den
    return a, b


def evaluate_reference(f: JetScalar, point: JetPoint) -> tuple[Fraction, Fraction]:
    """Pure-Python evaluation from the term list; used to cross-check :func:`evaluate`."""
    ring = f.ring
    keys = ring.keys
    A, B = f.numerator

    def ev(poly) -> Fraction:
        total = Fraction(0)
        for exps, coeff in poly.terms():
            term = _to_fraction(coeff)
            for i, e in enumerate(exps):
                if e:
                    term *= point.value(keys[i]) ** int(e)
            total += term
        return total

    a, b = ev(A), ev(B)
    if f.m:
        den = point.det ** f.m
        a, b = a / den, b / den
    return a, b


def evaluate_form(form: Form, point: JetPoint) -> dict:
    """Nonzero coefficient values keyed by generator product."""
    out = {}
    for key, c in form.terms.items():
        val = evaluate(c, point)
        if val != (0, 0):
            out[key] = val
    return out


@dataclass
class OracleVerdict:
    zero: bool
    points_tested: int
    first_failing_seed: int | None = None
    first_failing_point: dict | None = field(default=None)

    def to_dict(self) -> dict:
        return {"zero": self.zero, "points": self.points_tested, "failing_seed": self.first_failing_seed}


def point_seeds(seed: int, npoints: int) -> list[int]:
    rng = random.Random(f"points:{seed}")
    return [rng.getrandbits(63) for _ in range(npoints)]


def probabilistic_is_zero(obj, npoints: int = 20, seed: int = 0) -> OracleVerdict:
    """Evaluate a JetScalar or Form at ``npoints`` independent random points."""
    if isinstance(obj, JetScalar):
        obj = Form.scalar(obj)
    ring = obj.ring
    for i, s in enumerate(point_seeds(seed, npoints)):
        p = sample_jet_point(ring, s)
        if evaluate_form(obj, p):
            return OracleVerdict(False, i + 1, s, p.describe())
    return OracleVerdict(True, npoints)


def forms_agree(lhs: Form, rhs: Form, npoints: int = 20, seed: int = 0) -> OracleVerdict:
    """Compare both sides value by value (no symbolic subtraction involved)."""
    ring = lhs.ring
    if lhs.ring is not rhs.ring:
        raise ValueError("forms live on different jet rings")
    for i, s in enumerate(point_seeds(seed, npoints)):
        p = sample_jet_point(ring, s)
        if evaluate_form(lhs, p) != evaluate_form(rhs, p):
            return OracleVerdict(False, i + 1, s, p.describe())
    return OracleVerdict(True, npoints)
