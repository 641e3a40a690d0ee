"""Verification suites: named identity entries, their evaluation and the report data.

A suite is a list of :class:`EntrySpec` values.  Planning a suite is cheap and
builds nothing; each entry builds what it needs when run, so entries can be
dispatched to worker processes by id.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .dsl import FieldSpec
from .fields import SpacetimeField, StrictHorizontal, StrictVertical, diffeo_action, evolutionary_part
from .formalg import (Form, euler_operator, horizontal_differential, interior_product, lie_derivative,
                      total_differential, vertical_differential, wedge)
from .geometry import (check_covariance, christoffel_family, covariance_residual, covariant_derivative,
                       delta_metric_family, divergence_1_sides, divergence_2_sides, geometry,
                       inverse_metric_family, metric_family)
from .gr import (IdentityCheck, einstein_tensor_form, gr_theory, noether_checks, verify_hamiltonian_pair,
                 verify_lepage_invariance)
from .jetscalar import JetScalar, metric_ring
from .linfty import (LabelAlgebra, MomentumMap, ce_boundary_squared, general_bracket_expansion, l_bracket,
                     two_bracket_display)
from .mech import MechContext, mech_checks
from .oracle import evaluate, evaluate_reference, forms_agree, sample_jet_point, _is_square
from .randgen import random_family, random_form, random_scalar

__all__ = ["RunConfig", "EntrySpec", "Claim", "ChainClaim", "Outcome", "plan", "run_entry", "SUITES",
           "RESIDUAL_CAP"]

RESIDUAL_CAP = 200
SUITES = ("verify-gr", "verify-linfty", "verify-mech", "verify-covariance", "verify-divergence",
          "verify-bicomplex", "oracle-audit")


@dataclass
class RunConfig:
    command: str
    dim: int = 2
    jet_cap: int = 6
    vsym_cap: int = 5
    points: int = 20
    seed: int = 0
    jobs: int = 1
    fmt: str = "text"
    allow_large: bool = False
    k: int | None = None
    fields: tuple = ()          # FieldSpec values from --field
    potential: str = "0"
    particles: int = 1
    samples: int = 20           # random instances per property entry
    timings: bool = False

    def public(self) -> dict:
        """The part of the configuration that determines the report (no jobs, no format)."""
        out = {"dim": self.dim, "jet_cap": self.jet_cap, "vsym_cap": self.vsym_cap,
               "points": self.points, "seed": self.seed, "samples": self.samples}
        if self.command == "verify-linfty":
            out["k"] = self.k
        if self.command == "verify-mech":
            out = {"particles": self.particles, "potential": self.potential, "jet_cap": self.jet_cap,
                   "points": self.points, "seed": self.seed}
        if self.fields:
            out["fields"] = [f.name for f in self.fields]
        return out


@dataclass
class Claim:
    """``lhs = rhs`` for forms or jet scalars; ``rhs=None`` means zero."""

    name: str
    lhs: object
    rhs: object = None
    expect_zero: bool = True  # False: lhs - rhs is known to be nonzero


@dataclass
class ChainClaim:
    """A formal sum of wedge words that must vanish (no oracle: nothing to evaluate)."""

    name: str
    residual: dict


@dataclass
class Outcome:
    claims: list
    printed: dict | None = None


@dataclass(frozen=True)
class EntrySpec:
    id: str
    description: str
    run: Callable = field(compare=False)


# -- shared construction -------------------------------------------------

class _Context:
    """Lazily built objects shared by the entries of one process."""

    def __init__(self, config: RunConfig):
        self.config = config
        self._theory = None
        self._algs: dict = {}
        self._momenta: dict = {}

    @property
    def theory(self):
        if self._theory is None:
            c = self.config
            self._theory = gr_theory(c.dim, c.jet_cap, c.vsym_cap)
        return self._theory

    @property
    def ring(self):
        c = self.config
        return metric_ring(c.dim, c.jet_cap, c.vsym_cap)

    def rng(self, tag: str) -> random.Random:
        return random.Random(f"{self.config.seed}:{tag}")

    def user_fields(self, default: tuple = ("v",)) -> list[SpacetimeField]:
        specs = self.config.fields or tuple(FieldSpec(lab, True) for lab in default)
        return [spec_to_field(self.ring, s) for s in specs]

    def algebra(self, kind: str) -> LabelAlgebra:
        hit = self._algs.get(kind)
        if hit is None:
            ring = self.ring
            if kind == "coordinate":
                hit = LabelAlgebra.coordinate(ring)
            elif kind == "affine":
                hit = LabelAlgebra.affine(ring)
            elif kind == "formal":
                hit = LabelAlgebra.formal(ring, ["u", "v", "w"])
            else:
                hit = LabelAlgebra(ring, composite=True)
                for f in self.user_fields():
                    hit.register(f.name, f)
            self._algs[kind] = hit
        return hit

    def release(self) -> None:
        """Drop label algebras and memoised contraction chains; the theory is kept."""
        self._algs.clear()
        self._momenta.clear()

    def momentum(self, kind: str) -> MomentumMap:
        hit = self._momenta.get(kind)
        if hit is None:
            hit = MomentumMap(self.theory, self.algebra(kind))
            self._momenta[kind] = hit
        return hit


def spec_to_field(ring, spec: FieldSpec) -> SpacetimeField:
    if spec.formal:
        return SpacetimeField.formal(ring, spec.name)
    comps = []
    for poly in spec.components:
        terms = []
        for exps, c in poly.items():
            t = ring.const(c)
            for a, e in enumerate(exps, start=1):
                if e:
                    t = t * ring.x(a) ** e
            terms.append(t)
        comps.append(JetScalar.sum(terms, ring))
    return SpacetimeField(ring, comps, spec.name)


def _from_checks(checks: list[IdentityCheck]) -> list[Claim]:
    return [Claim(c.name, c.lhs, c.rhs) for c in checks]


def _printed(printed: Form, derived: Form, note: str) -> dict:
    diff = printed - derived
    return {"matches": diff.is_zero(),
            "difference_bidegrees": [list(b) for b in sorted(diff.bidegrees())],
            "note": note}


# -- verify-gr -----------------------------------------------------------

def _gr_split(ctx):
    th = ctx.theory
    return Outcome([Claim("split", th.EL - vertical_differential(th.L), horizontal_differential(th.gamma))])


def _gr_euler(ctx):
    th = ctx.theory
    return Outcome([Claim("P(δL)=EL", euler_operator(vertical_differential(th.L)), th.EL)])


def _gr_euler_kernel(ctx):
    ring = ctx.ring
    rng = ctx.rng("euler-kernel")
    claims = []
    for i in range(max(ctx.config.samples, 20)):
        beta = random_form(ring, rng, 1, ring.n - 1, nterms=2, max_order=2)
        claims.append(Claim(f"P(dβ)[{i}]", euler_operator(horizontal_differential(beta))))
    return Outcome(claims)


def _gr_euler_source(ctx):
    ring = ctx.ring
    rng = ctx.rng("euler-source")
    vol = Form.dx(ring, *range(1, ring.n + 1))
    claims = []
    for i in range(5):
        f = random_scalar(ring, rng, max_order=0, nterms=2, with_s=False)
        comp = rng.choice(ring.schema.components)
        src = wedge(Form.delta(ring, ring.fibre_coord(comp)) * f, vol)
        claims.append(Claim(f"P(source)[{i}]", euler_operator(src), src))
    return Outcome(claims)


def _gr_gamma_question(ctx):
    th = ctx.theory
    return Outcome([Claim("P(δL)-δL-dγ", euler_operator(vertical_differential(th.L)) - vertical_differential(th.L),
                          horizontal_differential(th.gamma))])


def _gr_lepage(which):
    def run(ctx):
        claims = []
        for v in ctx.user_fields():
            for c in verify_lepage_invariance(ctx.theory, v):
                if c.name in which:
                    claims.append(Claim(f"{c.name}[{v.name}]", c.lhs, c.rhs))
        return Outcome(claims)
    return run


def _gr_lepage_total(ctx):
    th = ctx.theory
    return Outcome([Claim(f"𝓛_ρ({v.name})λ", lie_derivative(diffeo_action(v), th.lepage))
                    for v in ctx.user_fields()])


def _gr_noether(which):
    def run(ctx):
        claims = []
        for v in ctx.user_fields():
            for c in noether_checks(ctx.theory, v):
                if c.name == which:
                    claims.append(Claim(f"{c.name}[{v.name}]", c.lhs, c.rhs))
        return Outcome(claims)
    return run


def _gr_einstein_div(ctx):
    geo = geometry(ctx.ring)
    return Outcome([Claim(f"∇_aG^a{b}", geo.einstein_divergence(b)) for b in range(1, ctx.ring.n + 1)])


def _gr_einstein_2d(ctx):
    return Outcome([Claim("G^ab", einstein_tensor_form(ctx.theory))])


def _gr_omega(ctx):
    th = ctx.theory
    return Outcome([Claim("ω=𝐝λ", total_differential(th.lepage), th.omega),
                    Claim("𝐝ω=0", total_differential(th.omega))])


def _gr_hamiltonian(ctx):
    th = ctx.theory
    claims = []
    for v in ctx.user_fields():
        X = diffeo_action(v)
        alpha = interior_product(X, th.lepage)
        chk = verify_hamiltonian_pair(th, X, alpha)
        claims.append(Claim(f"ι_ρω+𝐝μ1[{v.name}]", chk.hamiltonian))
        claims.append(Claim(f"𝓛_ρω[{v.name}]", chk.preserves_omega))
        claims.append(Claim(f"ι_ξEL-dj[{v.name}]", chk.current))
    zero_field = diffeo_action(SpacetimeField(th.ring, [th.ring.zero] * th.ring.n, "0"))
    zero = verify_hamiltonian_pair(th, zero_field, Form.zero(th.ring))
    claims.append(Claim("(0,0)", zero.hamiltonian))
    return Outcome(claims)


def _gr_hamiltonian_perturbed(ctx):
    """Adding a non-closed (0,n-1)-form to μ_1 breaks the hamiltonian condition by exactly its differential."""
    th = ctx.theory
    ring = th.ring
    claims = []
    for v in ctx.user_fields():
        X = diffeo_action(v)
        junk = Form.monomial(ring.g(1, 1) * ring.x(1), (), tuple(range(1, ring.n)))
        d_junk = total_differential(junk)
        chk = verify_hamiltonian_pair(th, X, interior_product(X, th.lepage) + junk)
        claims.append(Claim(f"ι_ρω+𝐝(μ1+junk)[{v.name}]", chk.hamiltonian, d_junk))
        claims.append(Claim(f"not hamiltonian[{v.name}]", ring.const(int(chk.ok))))
        claims.append(Claim(f"𝐝junk nonzero[{v.name}]", ring.const(int(d_junk.is_zero()))))
    return Outcome(claims)


def gr_suite(config: RunConfig) -> list[EntrySpec]:
    out = [
        EntrySpec("gr.split", "EL - δL = dγ for the Hilbert-Einstein lagrangian", _gr_split),
        EntrySpec("gr.euler.self_check", "Euler operator reproduces EL from δL", _gr_euler),
        EntrySpec("gr.euler.exact_kernel", "Euler operator annihilates random d-exact (1,n)-forms",
                  _gr_euler_kernel),
        EntrySpec("gr.euler.source_fixed", "Euler operator fixes source forms built from 0-jets",
                  _gr_euler_source),
        EntrySpec("gr.boundary_form.unique_split", "P(δL) - δL equals dγ for the chosen boundary form exactly",
                  _gr_gamma_question),
        EntrySpec("gr.lepage.L", "𝓛_ξ L = -𝓛_v̂ L, so L is invariant under ρ(v)", _gr_lepage({"lepage.L"})),
        EntrySpec("gr.lepage.gamma", "𝓛_ξ γ = -𝓛_v̂ γ, so γ is invariant under ρ(v)",
                  _gr_lepage({"lepage.gamma"})),
        EntrySpec("gr.lepage.horizontal_L", "𝓛_v̂ L = d(R v^a ι_a vol)", _gr_lepage({"lepage.horizontal_L"})),
        EntrySpec("gr.lepage.vertical_L", "𝓛_ξ L = -d(R v^a ι_a vol)", _gr_lepage({"lepage.vertical_L"})),
        EntrySpec("gr.lepage.total", "𝓛_ρ(v) (L + γ) = 0", _gr_lepage_total),
        EntrySpec("gr.noether.conservation", "d j_v = ι_ξ EL for j_v = -ι_v̂ L - ι_ξ γ",
                  _gr_noether("noether.conservation")),
        EntrySpec("gr.noether.closed_form",
                  "j_v = 2 G^ab v_a ι_b vol + d(½(∇^a v^b - ∇^b v^a) ι_a ι_b vol)",
                  _gr_noether("noether.closed_form")),
        EntrySpec("gr.noether.source_divergence", "ι_ξ EL = d(2 G^ab v_b ι_a vol)",
                  _gr_noether("noether.source_divergence")),
        EntrySpec("gr.einstein.divergence_free", "∇_a G^ab = 0", _gr_einstein_div),
        EntrySpec("gr.omega", "ω = 𝐝(L + γ) and 𝐝ω = 0", _gr_omega),
        EntrySpec("gr.hamiltonian_pair", "(ρ(v), μ_1(v)) is a hamiltonian pair and (0, 0) is one",
                  _gr_hamiltonian),
        EntrySpec("gr.hamiltonian_pair.perturbed", "μ_1(v) plus a non-closed form is not hamiltonian for ρ(v)",
                  _gr_hamiltonian_perturbed),
    ]
    if config.dim == 2:
        out.insert(14, EntrySpec("gr.einstein.vanishes_2d", "G^ab ≡ 0 in two dimensions", _gr_einstein_2d))
    return out


# -- verify-covariance ---------------------------------------------------

def _cov_family(name, build, expect_zero=True):
    def run(ctx):
        fam = build(ctx.ring)
        claims = []
        for v in ctx.user_fields():
            for idx, res in sorted(covariance_residual(fam, v).items()):
                claims.append(Claim(f"{name}{list(idx)}[{v.name}]", res))
        if not claims:
            claims.append(Claim(f"{name}", Form.zero(ctx.ring)))
        return Outcome(claims)
    return run


def _cov_christoffel(ctx):
    ring = ctx.ring
    fam = christoffel_family(ring)
    claims = []
    for v in ctx.user_fields():
        res = covariance_residual(fam, v)
        for idx in fam.indices():
            a, b, c = idx
            expected = Form.scalar(-v.derivative(a, b).total_derivative(c))
            got = res.get(idx, Form.zero(ring))
            claims.append(Claim(f"Γ{list(idx)}[{v.name}]", got, expected))
    return Outcome(claims)


def _cov_vol(ctx):
    geo = geometry(ctx.ring)
    return Outcome([Claim(f"𝓛_ρ vol[{v.name}]", lie_derivative(diffeo_action(v), geo.vol()))
                    for v in ctx.user_fields()])


def _nabla_delta_metric(ring):
    return covariant_derivative(delta_metric_family(ring))


def covariance_suite(config: RunConfig) -> list[EntrySpec]:
    return [
        EntrySpec("covariance.metric", "g_ab is a covariant family", _cov_family("g", metric_family)),
        EntrySpec("covariance.delta_metric", "δg_ab is a covariant family", _cov_family("δg", delta_metric_family)),
        EntrySpec("covariance.inverse_metric", "g^ab is a contravariant family",
                  _cov_family("g^-1", inverse_metric_family)),
        EntrySpec("covariance.volume", "the volume form s dx^1...dx^n is invariant", _cov_vol),
        EntrySpec("covariance.christoffel", "Γ^a_bc fails covariance by exactly -∂_b∂_c v^a", _cov_christoffel),
        EntrySpec("covariance.nabla_delta_metric", "∇_c δg_ab is a covariant family",
                  _cov_family("∇δg", _nabla_delta_metric)),
    ]


# -- verify-divergence ---------------------------------------------------

def _div1(ctx):
    ring = ctx.ring
    rng = ctx.rng("div1")
    claims = []
    for i in range(max(ctx.config.samples, 20)):
        p = i % 3
        lhs, rhs = divergence_1_sides(random_family(ring, rng, 1, p, 0))
        claims.append(Claim(f"({p},0)[{i}]", lhs, rhs))
    return Outcome(claims)


def _div2(ctx):
    ring = ctx.ring
    rng = ctx.rng("div2")
    claims = []
    printed_bad = []
    for i in range(max(ctx.config.samples, 20)):
        p, q = i % 3, (i // 3) % 2
        fam = random_family(ring, rng, 2, p, q, antisymmetric=True)
        lhs, rhs = divergence_2_sides(fam)
        claims.append(Claim(f"({p},{q})[{i}]", lhs, rhs))
        plhs, prhs = divergence_2_sides(fam, sign_exponent="p")
        if not (plhs - prhs).is_zero():
            printed_bad.append([p, q])
    bad = sorted({tuple(b) for b in printed_bad})
    printed = {"matches": not bad, "difference_bidegrees": [list(b) for b in bad],
               "note": "with the sign (-1)^p the identity fails for (p,1) families; (-1)^(p+q) holds for all"}
    return Outcome(claims, printed)


def divergence_suite(config: RunConfig) -> list[EntrySpec]:
    return [
        EntrySpec("divergence.vector", "∇_a χ^a ∧ vol = (-1)^p d(χ^a ∧ ι_a vol) for random (p,0) families",
                  _div1),
        EntrySpec("divergence.bivector",
                  "∇_a χ^ab ∧ ι_b vol = (-1)^(p+q) d(½ χ^ab ∧ ι_a ι_b vol) for random antisymmetric families",
                  _div2),
    ]


# -- verify-bicomplex ----------------------------------------------------

def _bicomplex(ctx):
    ring = ctx.ring
    rng = ctx.rng("bicomplex")
    n = ring.n
    bidegrees = [(p, q) for p in range(0, 4) for q in range(0, n + 1)]
    count = max(200, ctx.config.samples)
    claims = []
    for i in range(count):
        p, q = bidegrees[i % len(bidegrees)]
        a = random_form(ring, rng, p, q, nterms=2, max_order=2)
        d, h = vertical_differential, horizontal_differential
        claims.append(Claim(f"δδ({p},{q})[{i}]", d(d(a))))
        claims.append(Claim(f"dd({p},{q})[{i}]", h(h(a))))
        claims.append(Claim(f"δd+dδ({p},{q})[{i}]", d(h(a)) + h(d(a))))
    return Outcome(claims)


def _leibniz(ctx):
    ring = ctx.ring
    rng = ctx.rng("leibniz")
    claims = []
    for i in range(20):
        p1, q1, p2 = rng.randint(0, 2), rng.randint(0, ring.n), rng.randint(0, 2)
        q2 = rng.randint(0, ring.n - q1)
        a = random_form(ring, rng, p1, q1)
        b = random_form(ring, rng, p2, q2)
        sign = -1 if (p1 + q1) % 2 else 1
        for name, op in (("δ", vertical_differential), ("d", horizontal_differential)):
            claims.append(Claim(f"{name}(a∧b)[{i}]", op(wedge(a, b)), wedge(op(a), b) + wedge(a, op(b)) * sign))
    return Outcome(claims)


def bicomplex_suite(config: RunConfig) -> list[EntrySpec]:
    return [
        EntrySpec("bicomplex.axioms", "δ² = 0, d² = 0 and δd + dδ = 0 on random forms of every bidegree",
                  _bicomplex),
        EntrySpec("bicomplex.leibniz", "δ and d are graded derivations of the wedge product", _leibniz),
    ]


# -- verify-linfty -------------------------------------------------------

def _morphism(kind, k):
    def run(ctx):
        M = ctx.momentum(kind)
        return Outcome([Claim(f"{'∧'.join(w)}", M.morphism_residual(w)) for w in M.alg.words(k)])
    return run


def _mu_bracket(kind):
    def run(ctx):
        M = ctx.momentum(kind)
        return Outcome([Claim(f"{v},{w}", M.mu_bracket_residual(v, w)) for v, w in M.alg.words(2)])
    return run


def _triple(kind):
    def run(ctx):
        M = ctx.momentum(kind)
        return Outcome([Claim(f"{'∧'.join(w)}", M.triple_display_residual(*w)) for w in M.alg.words(3)])
    return run


def _ce_square(kind, k):
    def run(ctx):
        alg = ctx.algebra(kind)
        return Outcome([ChainClaim("∧".join(w), ce_boundary_squared(alg, w)) for w in alg.words(k)])
    return run


def _formal_words(ctx, k):
    labels = ("u", "v", "w")[:k] if not ctx.config.fields else None
    alg = ctx.algebra("formal" if labels else "user")
    if labels:
        return alg, [labels]
    return alg, alg.words(k)


def _mu1_split(ctx):
    kind = "user" if ctx.config.fields else "formal"
    M = ctx.momentum(kind)
    claims = []
    for (a,) in M.alg.words(1):
        vh = M.parts(a)[1]
        claims.append(Claim(a, M.mu((a,)), -M.current(a) + interior_product(vh, ctx.theory.gamma)))
    return Outcome(claims)


def _mu_split(k):
    def run(ctx):
        alg, words = _formal_words(ctx, k)
        M = ctx.momentum("user" if ctx.config.fields else "formal")
        claims = [Claim("∧".join(w), M.mu(w), M.mu_split(w)) for w in words]
        printed = None
        if k == 2:
            w = words[0]
            printed = _printed(M.mu2_printed(*w), M.mu(w),
                               "the printed μ_2 example has the opposite sign on its (0,n-2) part")
        return Outcome(claims, printed)
    return run


def _bracket_expansion(k):
    def run(ctx):
        alg, words = _formal_words(ctx, k)
        M = ctx.momentum("user" if ctx.config.fields else "formal")
        th = ctx.theory
        claims = []
        printed = None
        for w in words:
            fields = [M.rho(a) for a in w]
            lk = l_bracket(th, fields)
            claims.append(Claim(f"general[{'∧'.join(w)}]", general_bracket_expansion(th, fields), lk))
            if k == 2:
                claims.append(Claim(f"display[{'∧'.join(w)}]", two_bracket_display(th, *fields, printed=False), lk))
                if printed is None:
                    printed = _printed(two_bracket_display(th, *fields, printed=True), lk,
                                       "the printed 2-bracket display contracts EL with X∥ twice; "
                                       "the expansion needs ι_Y∥ ι_X∥ EL")
        return Outcome(claims, printed)
    return run


def _nu_bracket(k):
    def run(ctx):
        alg, words = _formal_words(ctx, k)
        M = ctx.momentum("user" if ctx.config.fields else "formal")
        return Outcome([Claim("∧".join(w), M.nu_bracket_residual(w)) for w in words])
    return run


def _l2_antisymmetry(ctx):
    alg, words = _formal_words(ctx, 2)
    M = ctx.momentum("user" if ctx.config.fields else "formal")
    claims = []
    for v, w in words:
        X, Y = M.rho(v), M.rho(w)
        claims.append(Claim(f"{v},{w}", l_bracket(ctx.theory, [X, Y]), -l_bracket(ctx.theory, [Y, X])))
        claims.append(Claim(f"l1l1[{v}]", total_differential(total_differential(M.mu((v,))))))
    return Outcome(claims)


def linfty_suite(config: RunConfig) -> list[EntrySpec]:
    n = config.dim
    kmax = config.k or n
    out = []
    kinds = ["coordinate", "affine", "user" if config.fields else "formal"]
    for k in range(1, kmax + 1):
        for kind in kinds:
            out.append(EntrySpec(f"linfty.morphism.k{k}.{kind}",
                                 f"𝐝μ_{k} + μ_{k - 1}δ = ν on all {kind} words of length {k}", _morphism(kind, k)))
    out.append(EntrySpec("linfty.mu1_split", "μ_1(v) = -j_v + ι_v̂ γ", _mu1_split))
    for k in range(2, kmax + 1):
        out.append(EntrySpec(f"linfty.mu_split.k{k}",
                             f"μ_{k} splits into Noether currents, (1-k) ι…ι L and ι…ι γ", _mu_split(k)))
        out.append(EntrySpec(f"linfty.bracket_expansion.k{k}",
                             f"the bidegree expansion of l_{k} agrees with the contraction definition",
                             _bracket_expansion(k)))
        out.append(EntrySpec(f"linfty.nu_bracket.k{k}", f"ν = -l_{k}(μ_1, …, μ_1)", _nu_bracket(k)))
    if kmax >= 2:
        for kind in kinds[1:]:
            out.append(EntrySpec(f"linfty.mu_bracket.{kind}", "l_2(μ_1 a, μ_1 b) = μ_1([a,b]) - 𝐝μ_2(a∧b)",
                                 _mu_bracket(kind)))
        out.append(EntrySpec("linfty.l2_antisymmetry", "l_2 is antisymmetric and l_1 l_1 = 0", _l2_antisymmetry))
    if kmax >= 3:
        for kind in kinds[1:]:
            out.append(EntrySpec(f"linfty.triple.{kind}",
                                 "l_3(μ_1 a, μ_1 b, μ_1 c) = μ_2([a,b]∧c + [b,c]∧a + [c,a]∧b) - 𝐝μ_3(a∧b∧c)",
                                 _triple(kind)))
    for kind, size in (("coordinate", n), ("affine", n + n * n)):
        k = 3 if size >= 3 else 2
        out.append(EntrySpec(f"linfty.ce_square.{kind}", f"δ∘δ = 0 on {kind} words of length {k}",
                             _ce_square(kind, k)))
    return out


# -- verify-mech ---------------------------------------------------------

MECH_DESCRIPTIONS = {
    "mech.split": "δL = EL - dγ for L = (½ q̇·q̇ - V) dt",
    "mech.euler": "Euler operator reproduces EL = -(q̈ + ∂V/∂q) δq ∧ dt",
    "mech.omega": "ω = EL + δq̇ ∧ δq",
    "mech.omega_exact": "ω = 𝐝(L + γ)",
    "mech.rho_dt": "ρ(∂_t) acts as ∂/∂t on jet coordinates and their differentials",
    "mech.lepage_invariant": "𝓛_ρ(∂_t) (L + γ) = 0",
    "mech.energy": "j_∂t = ½ q̇·q̇ + V(q)",
    "mech.momentum": "μ_1(∂_t) = -j_∂t",
    "mech.gamma_degree": "ι_∂̂t γ = 0",
    "mech.noether": "d j_∂t = ι_ξ EL",
}


def _mech_entry(name):
    def run(ctx):
        c = ctx.config
        mctx = MechContext.parse(c.particles, c.potential, c.jet_cap)
        for chk in mech_checks(mctx):
            if chk.name == name:
                return Outcome([Claim(name, chk.lhs, chk.rhs)])
        raise KeyError(name)
    return run


def mech_suite(config: RunConfig) -> list[EntrySpec]:
    return [EntrySpec(name, desc, _mech_entry(name)) for name, desc in MECH_DESCRIPTIONS.items()]


# -- oracle-audit --------------------------------------------------------

def _audit_corpus(ctx):
    """Random expressions with known zero status, both built and tested independently."""
    ring = ctx.ring
    rng = ctx.rng("audit")
    claims = []
    geo = geometry(ring)
    n = ring.n
    for i in range(max(ctx.config.samples, 20)):
        f = random_scalar(ring, rng, max_order=2, nterms=3)
        g = random_scalar(ring, rng, max_order=2, nterms=2)
        h = random_scalar(ring, rng, max_order=1, nterms=2)
        claims.append(Claim(f"comm[{i}]", f * g, g * f))
        claims.append(Claim(f"square[{i}]", (f + g) * (f + g), f * f + f * g * 2 + g * g))
        claims.append(Claim(f"distrib[{i}]", f * (g + h), f * g + f * h))
        claims.append(Claim(f"leibniz[{i}]", (f * g).total_derivative(1),
                            f.total_derivative(1) * g + f * g.total_derivative(1)))
        y = ring.fibre_coord(rng.choice(ring.schema.components), [rng.randint(1, n)] * 3)
        claims.append(Claim(f"nonzero[{i}]", f * g + ring.coord(y) * (i + 1), g * f, expect_zero=False))
    claims.append(Claim("s^2+det", ring.s * ring.s + ring.det_g()))
    for a in range(1, n + 1):
        for c in range(1, n + 1):
            contr = JetScalar.sum([geo.ginv(a, b) * ring.g(b, c) for b in range(1, n + 1)], ring)
            claims.append(Claim(f"g^-1 g[{a}{c}]", contr, ring.one if a == c else ring.zero))
    return Outcome(claims)


def _audit_homomorphism(ctx):
    """Evaluation respects products and sums, and agrees with the pure-Python evaluator."""
    ring = ctx.ring
    rng = ctx.rng("homomorphism")
    one = ring.one
    claims = []
    seeds = [rng.getrandbits(63) for _ in range(ctx.config.points)]
    for i, seed in enumerate(seeds):
        p = sample_jet_point(ring, seed)
        f = random_scalar(ring, rng, max_order=2, nterms=3)
        g = random_scalar(ring, rng, max_order=2, nterms=3)
        (a1, b1), (a2, b2) = evaluate(f, p), evaluate(g, p)
        s2 = p.s_squared()
        prod = (a1 * a2 + b1 * b2 * s2, a1 * b2 + a2 * b1)
        ok = evaluate(f * g, p) == prod and evaluate(f + g, p) == (a1 + a2, b1 + b2)
        ok = ok and evaluate(f * g, p) == evaluate_reference(f * g, p)
        claims.append(Claim(f"point[{i}]", one, one if ok else ring.zero))
    return Outcome(claims)


def _audit_sampler(ctx):
    ring = ctx.ring
    claims = []
    bad = 0
    for seed in range(1000 if ring.n <= 3 else 200):
        p = sample_jet_point(ring, seed)
        if not (p.det < 0 and not _is_square(-p.det)):
            bad += 1
    claims.append(Claim("det<0 and -det non-square", ring.const(bad)))
    p1, p2 = sample_jet_point(ring, 7), sample_jet_point(ring, 7)
    c = ring.fibre_coord(ring.schema.components[0], [1])
    same = p1.describe() == p2.describe() and p1.value(c) == p2.value(c)
    claims.append(Claim("deterministic", ring.const(0 if same else 1)))
    m = sample_jet_point(ring, 0, forced="minkowski")
    claims.append(Claim("minkowski det", ring.const(m.det), ring.const(-1)))
    return Outcome(claims)


def oracle_suite(config: RunConfig) -> list[EntrySpec]:
    out = [
        EntrySpec("oracle.corpus", "canonical and randomised zero tests agree on a random expression corpus",
                  _audit_corpus),
        EntrySpec("oracle.homomorphism", "evaluation is a ring homomorphism and matches the reference evaluator",
                  _audit_homomorphism),
        EntrySpec("oracle.sampler", "sampled metrics are lorentzian with irrational volume density",
                  _audit_sampler),
    ]
    # every identity of the cheaper suites, rerun with oracle cross-checks
    for suite in (gr_suite, covariance_suite, divergence_suite, bicomplex_suite):
        for e in suite(config):
            out.append(EntrySpec(f"oracle.{e.id}", e.description, e.run))
    mech_config = RunConfig("verify-mech", jet_cap=config.jet_cap, points=config.points, seed=config.seed,
                            potential="q1^4 - 3*q1*q2 + 1/3*q2^3", particles=2)
    for e in mech_suite(mech_config):
        out.append(EntrySpec(f"oracle.{e.id}", e.description, _with_config(e.run, mech_config)))
    return out


def _with_config(run, config):
    def wrapped(ctx):
        return run(_Context(config))
    return wrapped


PLANNERS = {
    "verify-gr": gr_suite,
    "verify-linfty": linfty_suite,
    "verify-mech": mech_suite,
    "verify-covariance": covariance_suite,
    "verify-divergence": divergence_suite,
    "verify-bicomplex": bicomplex_suite,
    "oracle-audit": oracle_suite,
}


def plan(config: RunConfig) -> list[EntrySpec]:
    entries = PLANNERS[config.command](config)
    ids = [e.id for e in entries]
    if len(set(ids)) != len(ids):
        raise AssertionError("duplicate entry ids in suite plan")
    return entries


# -- evaluation ----------------------------------------------------------

_contexts: dict = {}


def _context(config: RunConfig) -> _Context:
    key = repr(config)
    hit = _contexts.get(key)
    if hit is None:
        hit = _contexts[key] = _Context(config)
    return hit


def _as_form(x, ring) -> Form:
    if x is None:
        return Form.zero(ring)
    if isinstance(x, JetScalar):
        return Form.scalar(x)
    return x


def _evaluate(outcome: Outcome, config: RunConfig) -> dict:
    failed = None
    disagreements = 0
    oracle_zero = True
    failing_seed = None
    checked = 0
    for claim in outcome.claims:
        if isinstance(claim, ChainClaim):
            if claim.residual and failed is None:
                failed = (claim.name, None, claim.residual)
            continue
        ring = (claim.lhs if claim.lhs is not None else claim.rhs).ring
        lhs, rhs = _as_form(claim.lhs, ring), _as_form(claim.rhs, ring)
        residual = lhs - rhs
        sym_zero = residual.is_zero()
        verdict = forms_agree(lhs, rhs, config.points, config.seed)
        checked += 1
        if verdict.zero != sym_zero:
            disagreements += 1
        if not verdict.zero and claim.expect_zero:
            oracle_zero = False
            if failing_seed is None:
                failing_seed = verdict.first_failing_seed
        if sym_zero != claim.expect_zero and failed is None:
            failed = (claim.name, residual, None)
    out = {
        "status": "pass" if failed is None and disagreements == 0 else "fail",
        "claims": len(outcome.claims),
        "residual": None,
        "oracle": {"claims": checked, "points": config.points, "zero": oracle_zero,
                   "disagreements": disagreements, "failing_seed": failing_seed},
    }
    if failed is not None:
        name, res, chain = failed
        if res is not None:
            out["residual"] = {"claim": name, "monomials": res.nterms(), "text": res.to_text(max_terms=RESIDUAL_CAP)}
        else:
            text = " + ".join(f"{c}*{'∧'.join(w)}" for w, c in sorted(chain.items()))
            out["residual"] = {"claim": name, "monomials": len(chain), "text": text}
    if outcome.printed is not None:
        out["printed_display"] = outcome.printed
    return out


def run_entry(config: RunConfig, entry_id: str) -> dict:
    """Run one entry of the configured suite and return its report record."""
    spec = next(e for e in plan(config) if e.id == entry_id)
    t0 = time.perf_counter()
    ctx = _context(config)
    try:
        outcome = spec.run(ctx)
        record = {"id": spec.id, "description": spec.description}
        record.update(_evaluate(outcome, config))
    finally:
        ctx.release()
    record["seconds"] = round(time.perf_counter() - t0, 3)
    return record
