"""The current L∞-algebra of (J^∞F, ω) and the homotopy momentum map by contraction.

Elements of the Lie algebra of spacetime vector fields are referred to by
label inside a :class:`LabelAlgebra`.  Concrete fields (``∂_a``, ``x^b ∂_a``)
have brackets decomposed back onto the registered basis; formal fields get
composite labels such as ``[v,w]`` registered on demand.
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import flint

from .fields import SpacetimeField, StrictHorizontal, StrictVertical, diffeo_action, evolutionary_part
from .formalg import Form, interior_product, total_differential, vertical_differential
from .gr import LagrangianData, noether_current
from .jetscalar import JetRing

__all__ = [
    "BracketClosureError",
    "LabelAlgebra",
    "Word",
    "chevalley_boundary",
    "ce_apply",
    "MomentumMap",
    "l_bracket",
    "MorphismCheck",
    "general_bracket_expansion",
    "two_bracket_display",
    "ce_boundary_squared",
]


class BracketClosureError(ValueError):
    pass


Word = tuple  # tuple of labels


def _poly_vector(field: SpacetimeField) -> dict:
    """Coefficients of a polynomial vector field keyed by (component, sorted monomial)."""
    ring = field.ring
    out = {}
    for a, comp in enumerate(field.components, start=1):
        A, B = comp.numerator
        if comp.m or not B.is_zero():
            raise BracketClosureError("vector field components must be polynomial")
        keys = ring.keys
        for exps, coeff in A.terms():
            mono = tuple(sorted((keys[i], e) for i, e in enumerate(exps) if e))
            out[(a, mono)] = Fraction(int(coeff.p), int(coeff.q))
    return out


class LabelAlgebra:
    """A finite-dimensional Lie algebra of spacetime vector fields, addressed by label."""

    def __init__(self, ring: JetRing, composite: bool = False):
        self.ring = ring
        self.composite = composite
        self.fields: dict[str, SpacetimeField] = {}
        self.order: list[str] = []
        self._brackets: dict = {}
        self._lock = threading.RLock()

    @classmethod
    def coordinate(cls, ring: JetRing) -> "LabelAlgebra":
        alg = cls(ring)
        for a in range(1, ring.n + 1):
            alg.register(f"d{a}", SpacetimeField.coordinate(ring, a))
        return alg

    @classmethod
    def affine(cls, ring: JetRing) -> "LabelAlgebra":
        """``{∂_a} ∪ {x^b ∂_a}``, closed under the bracket."""
        alg = cls.coordinate(ring)
        for a in range(1, ring.n + 1):
            for b in range(1, ring.n + 1):
                alg.register(f"x{b}d{a}", SpacetimeField.affine(ring, b, a))
        return alg

    @classmethod
    def formal(cls, ring: JetRing, labels: Sequence[str]) -> "LabelAlgebra":
        alg = cls(ring, composite=True)
        for lab in labels:
            alg.register(lab, SpacetimeField.formal(ring, lab))
        return alg

    def register(self, label: str, field: SpacetimeField) -> None:
        with self._lock:
            if label in self.fields:
                raise ValueError(f"label {label!r} already registered")
            if field.ring is not self.ring:
                raise ValueError("field lives on a different jet ring")
            field = SpacetimeField(field.ring, field.components, label)
            self.fields[label] = field
            self.order.append(label)

    def field(self, label: str) -> SpacetimeField:
        try:
            return self.fields[label]
        except KeyError:
            raise KeyError(f"unknown vector-field label {label!r}") from None

    def index(self, label: str) -> int:
        return self.order.index(label)

    def decompose(self, field: SpacetimeField) -> dict[str, Fraction]:
        """Write ``field`` as a rational combination of registered fields."""
        if field.is_zero():
            return {}
        basis = [lab for lab in self.order if "[" not in lab]
        vecs = [_poly_vector(self.fields[lab]) for lab in basis]
        target = _poly_vector(field)
        rows = sorted(set().union(target, *vecs))
        if not basis:
            raise BracketClosureError("empty basis")
        mat = flint.fmpq_mat(len(rows), len(basis) + 1)
        for i, r in enumerate(rows):
            for j, vec in enumerate(vecs):
                c = vec.get(r, 0)
                if c:
                    mat[i, j] = flint.fmpq(c.numerator, c.denominator)
            c = target.get(r, 0)
            if c:
                mat[i, len(basis)] = flint.fmpq(c.numerator, c.denominator)
        rref, rank = mat.rref()
        sol = {}
        for i in range(rank):
            pivot = next(j for j in range(len(basis) + 1) if rref[i, j] != 0)
            if pivot == len(basis):
                raise BracketClosureError(f"{field.name} is not in the span of the registered fields")
            val = rref[i, len(basis)]
            if val != 0:
                sol[basis[pivot]] = Fraction(int(val.p), int(val.q))
        # consistency: reconstruct
        check = {}
        for lab, c in sol.items():
            for k, x in _poly_vector(self.fields[lab]).items():
                check[k] = check.get(k, 0) + c * x
        if {k: v for k, v in check.items() if v} != target:
            raise BracketClosureError(f"{field.name} is not in the span of the registered fields")
        return sol

    def bracket(self, a: str, b: str) -> dict[str, Fraction]:
        key = (a, b)
        hit = self._brackets.get(key)
        if hit is not None:
            return hit
        br = self.field(a).bracket(self.field(b))
        if br.is_zero():
            out = {}
        elif self.composite:
            label = f"[{a},{b}]"
            with self._lock:
                if label not in self.fields:
                    self.register(label, br)
            out = {label: Fraction(1)}
        else:
            out = self.decompose(br)
        self._brackets[key] = out
        return out

    def canonical(self, word: Word) -> tuple[int, Word | None]:
        """Sort a wedge word by registration order; returns (sign, word) or (0, None)."""
        idx = [self.index(lab) for lab in word]
        if len(set(idx)) != len(idx):
            return 0, None
        sign = 1
        items = list(zip(idx, word))
        for i in range(1, len(items)):
            j = i
            while j > 0 and items[j - 1][0] > items[j][0]:
                items[j - 1], items[j] = items[j], items[j - 1]
                sign = -sign
                j -= 1
        return sign, tuple(lab for _, lab in items)

    def words(self, k: int, labels: Sequence[str] | None = None) -> list[Word]:
        labels = list(labels) if labels is not None else [lab for lab in self.order if "[" not in lab]
        return [tuple(c) for c in itertools.combinations(labels, k)]


def chevalley_boundary(alg: LabelAlgebra, word: Word) -> dict[Word, Fraction]:
    """``δ(a_1 ∧ … ∧ a_k) = Σ_{i<j} (-1)^{i+j} [a_i, a_j] ∧ a_1 … â_i … â_j … a_k`` (1-based i, j)."""
    out: dict = {}
    k = len(word)
    for i in range(k):
        for j in range(i + 1, k):
            sign = -1 if ((i + 1) + (j + 1)) % 2 else 1
            rest = word[:i] + word[i + 1:j] + word[j + 1:]
            for lab, c in alg.bracket(word[i], word[j]).items():
                s, w = alg.canonical((lab,) + rest)
                if not s:
                    continue
                out[w] = out.get(w, 0) + sign * s * c
    return {w: c for w, c in out.items() if c}


def ce_apply(alg: LabelAlgebra, chain: dict[Word, Fraction]) -> dict[Word, Fraction]:
    """Extend the boundary linearly to a formal sum of words."""
    out: dict = {}
    for w, c in chain.items():
        for w2, c2 in chevalley_boundary(alg, w).items():
            out[w2] = out.get(w2, 0) + c * c2
    return {w: c for w, c in out.items() if c}


def ce_boundary_squared(alg: LabelAlgebra, word: Word) -> dict[Word, Fraction]:
    """``δ(δ(word))``; empty whenever the bracket satisfies the Jacobi identity."""
    return ce_apply(alg, chevalley_boundary(alg, word))


def l_bracket(theory: LagrangianData, fields: Sequence, forms: Sequence[Form] | None = None) -> Form:
    """``l_1 = 𝐝`` on a single form; for k > 1, ``l_k = -(-1)^k ι_{X_1} ⋯ ι_{X_k} ω``."""
    k = len(fields) if fields else len(forms or ())
    if k == 1 and forms:
        return total_differential(forms[0])
    out = theory.omega
    for X in reversed(list(fields)):
        out = interior_product(X, out)
    return out * (1 if k % 2 else -1)


class MomentumMap:
    """``μ_k(a_1…a_k) = ι_{ρ(a_1)} ⋯ ι_{ρ(a_k)} (L + γ)`` and ``ν = (-1)^k ι ⋯ ι ω`` with memoised chains."""

    def __init__(self, theory: LagrangianData, alg: LabelAlgebra):
        if alg.ring is not theory.ring:
            raise ValueError("label algebra and theory live on different jet rings")
        self.theory = theory
        self.alg = alg
        self._rho: dict = {}
        self._chains: dict = {}
        self._lock = threading.RLock()

    def rho(self, label: str):
        hit = self._rho.get(label)
        if hit is None:
            hit = diffeo_action(self.alg.field(label))
            self._rho[label] = hit
        return hit

    def _chain(self, base: str, word: Word) -> Form:
        key = (base, word)
        hit = self._chains.get(key)
        if hit is not None:
            return hit
        if not word:
            hit = self.theory.lepage if base == "lepage" else self.theory.omega
        else:
            hit = interior_product(self.rho(word[0]), self._chain(base, word[1:]))
        with self._lock:
            self._chains[key] = hit
        return hit

    def mu(self, word: Word) -> Form:
        if not word or len(word) > self.theory.ring.n:
            return Form.zero(self.theory.ring)
        return self._chain("lepage", tuple(word))

    def mu_chain(self, chain: dict[Word, Fraction]) -> Form:
        return Form.sum([self.mu(w) * c for w, c in chain.items()], self.theory.ring)

    def nu(self, word: Word) -> Form:
        out = self._chain("omega", tuple(word))
        return -out if len(word) % 2 else out

    def morphism_residual(self, word: Word) -> Form:
        """``𝐝μ_k(w) + μ_{k-1}(δw) - ν(w)``."""
        lhs = total_differential(self.mu(word)) + self.mu_chain(chevalley_boundary(self.alg, word))
        return lhs - self.nu(word)

    def hamiltonian_residual(self, label: str) -> Form:
        """``ι_{ρ(v)} ω + 𝐝μ_1(v)``."""
        return self._chain("omega", (label,)) + total_differential(self.mu((label,)))

    def nu_bracket_residual(self, word: Word) -> Form:
        """``ν(w) + l_k(μ_1(a_1), …, μ_1(a_k))`` with the hamiltonian fields ``ρ(a_i)``."""
        return self.nu(word) + l_bracket(self.theory, [self.rho(a) for a in word])

    def bracket_chain(self, pairs: Iterable[tuple[str, str]], rest: Word = ()) -> dict[Word, Fraction]:
        """``Σ [x, y] ∧ rest`` over ``pairs``, expanded on the registered labels."""
        out: dict = {}
        for x, y in pairs:
            for lab, c in self.alg.bracket(x, y).items():
                s, w = self.alg.canonical((lab,) + tuple(rest))
                if s:
                    out[w] = out.get(w, 0) + s * c
        return {w: c for w, c in out.items() if c}

    def mu_bracket_residual(self, v: str, w: str) -> Form:
        """``l_2(μ_1(v), μ_1(w)) - μ_1([v,w]) + 𝐝μ_2(v,w)``."""
        l2 = l_bracket(self.theory, [self.rho(v), self.rho(w)])
        rhs = self.mu_chain(self.bracket_chain([(v, w)])) - total_differential(self.mu((v, w)))
        return l2 - rhs

    def triple_display_residual(self, a: str, b: str, c: str) -> Form:
        """``l_3(μ_1 a, μ_1 b, μ_1 c) - μ_2([a,b]∧c + [b,c]∧a + [c,a]∧b) + 𝐝μ_3(a,b,c)``."""
        l3 = l_bracket(self.theory, [self.rho(a), self.rho(b), self.rho(c)])
        chain: dict = {}
        for (x, y), z in (((a, b), c), ((b, c), a), ((c, a), b)):
            for wd, coeff in self.bracket_chain([(x, y)], (z,)).items():
                chain[wd] = chain.get(wd, 0) + coeff
        rhs = self.mu_chain({w: k for w, k in chain.items() if k}) - total_differential(self.mu((a, b, c)))
        return l3 - rhs

    # -- printed displays ---------------------------------------------------
    def parts(self, label: str):
        v = self.alg.field(label)
        return StrictVertical(evolutionary_part(v)), StrictHorizontal(v)

    def current(self, label: str) -> Form:
        return noether_current(self.theory, self.alg.field(label))

    def mu_split(self, word: Word) -> Form:
        """The bidegree split of μ_k through Noether currents, L and γ."""
        th = self.theory
        k = len(word)
        hats = [self.parts(a)[1] for a in word]

        def contract(fields, form):
            for X in reversed(fields):
                form = interior_product(X, form)
            return form

        terms = []
        for i in range(k):
            sign = -1 if (k - (i + 1)) % 2 else 1
            terms.append(contract(hats[:i] + hats[i + 1:], self.current(word[i])) * (-sign))
        terms.append(contract(hats, th.L) * (1 - k))
        terms.append(contract(hats, th.gamma))
        return Form.sum(terms, th.ring)

    def mu2_printed(self, v: str, w: str) -> Form:
        """``(ι_v̂ j_w - ι_ŵ j_v + ι_v̂ ι_ŵ L) + ι_v̂ ι_ŵ γ`` as printed."""
        th = self.theory
        vh, wh = self.parts(v)[1], self.parts(w)[1]
        return Form.sum([
            interior_product(vh, self.current(w)),
            -interior_product(wh, self.current(v)),
            interior_product(vh, interior_product(wh, th.L)),
            interior_product(vh, interior_product(wh, th.gamma)),
        ], th.ring)


def general_bracket_expansion(theory: LagrangianData, fields: Sequence) -> Form:
    """The expansion of ``l_k`` into vertical/horizontal contractions of EL and δγ, term by term."""
    k = len(fields)
    EL = theory.EL
    dg = vertical_differential(theory.gamma)
    perp = [X.vertical_part() for X in fields]
    par = [X.horizontal_part() for X in fields]

    def hor(skip, form):
        for idx in reversed(range(k)):
            if idx in skip:
                continue
            form = interior_product(par[idx], form)
        return form

    terms = []
    for i in range(k):
        for j in range(i + 1, k):
            sign = -1 if (k - (i + 1) - (j + 1)) % 2 else 1
            inner = interior_product(perp[i], interior_product(perp[j], dg))
            terms.append(hor({i, j}, inner) * sign)
    for i in range(k):
        sign = -1 if i % 2 else 1
        terms.append(hor({i}, interior_product(perp[i], EL)) * sign)
        terms.append(hor({i}, interior_product(perp[i], dg)) * sign)
    lead = 1 if k % 2 else -1
    terms.append(hor(set(), EL) * lead)
    terms.append(hor(set(), dg) * lead)
    return Form.sum(terms, theory.ring)


def two_bracket_display(theory: LagrangianData, X, Y, printed: bool = True) -> Form:
    """Right-hand side of the five-term 2-bracket display.

    With ``printed`` the fourth term is ``ι_{X∥} ι_{X∥} EL`` exactly as printed
    (which vanishes identically); otherwise ``ι_{Y∥} ι_{X∥} EL``.
    """
    EL = theory.EL
    dg = vertical_differential(theory.gamma)
    Xp, Xh = X.vertical_part(), X.horizontal_part()
    Yp, Yh = Y.vertical_part(), Y.horizontal_part()
    ip = interior_product
    fourth = ip(Xh, ip(Xh, EL)) if printed else ip(Yh, ip(Xh, EL))
    return Form.sum([
        ip(Yp, ip(Xp, dg)),
        ip(Yh, ip(Xp, EL)) - ip(Xh, ip(Yp, EL)),
        ip(Yh, ip(Xp, dg)) - ip(Xh, ip(Yp, dg)),
        fourth,
        ip(Yh, ip(Xh, dg)),
    ], theory.ring)


@dataclass
class MorphismCheck:
    k: int
    word: Word
    residual: Form

    @property
    def ok(self) -> bool:
        return self.residual.is_zero()
