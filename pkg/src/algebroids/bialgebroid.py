"""Bialgebroid Hamiltonians, the operator action, and morphism checking.

A compatible pair of algebroid structures on a bundle and its dual is
encoded by the degree-three Hamiltonian chi = mu + L*(mu_dual) on T*[2]V[1],
where L is the Legendre exchange onto the dual-side chart; {chi, chi} = 0 is
the compatibility condition, cross-checked against the derivation identity
d([X,Y]) = [dX, Y] + [X, dY] on generator pairs.

A degree-three Hamiltonian acts on functions of V[1] as a formal-parameter
series of differential operators: each normal-ordered monomial U p_{j1}...
p_{jk} contributes hbar^{k-1} U d_{j1}...d_{jk} (left derivatives, outermost
factor first), which is the normal-ordered quantization of the vertical
Taylor pairing.  The formal parameter has degree 2, so the action has
operator degree one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Tuple

from .algebroid import (AlgebroidSpec, hamiltonian_of_algebroid,
                        check_algebroid, ce_differential, schouten_bracket)
from .errors import (ChartMismatch, DegreeError, DegreeMismatch,
                     TruncationIncomplete)
from .gpoly import (Chart, GPoly, KIND_BASE, KIND_FORMAL,
                    FIBER_DIRECTION_KINDS, MOMENTUM_KINDS, inject,
                    partial_left, substitute)
from .report import Report
from .symplectic import (Hamiltonian, PolyMap, SymplecticChart,
                         canonical_bracket, legendre, twin_chart)

HBAR = "hbar"


def with_formal_parameter(chart: Chart, name: str = HBAR) -> Chart:
    if chart.has(name):
        return chart
    return chart.extend([(name, 2, KIND_FORMAL)])


def truncate_formal(poly: GPoly, cap: int, name: str = HBAR) -> GPoly:
    """Drop monomials whose formal-parameter exponent exceeds cap."""
    if not poly.chart.has(name):
        return poly
    k = poly.chart.index_of(name)
    return poly.component(lambda m: m[k] <= cap)


class BialgebroidSpec:
    """A pair of algebroid structures on a bundle and on its dual.

    The dual spec's fiber coordinates must carry the starred names of the
    primal ones with complementary section degrees, so that the dual-side
    chart is the Legendre twin of the primal one.
    """

    def __init__(self, primal: AlgebroidSpec, dual: AlgebroidSpec):
        if primal.base != dual.base:
            raise ChartMismatch("both structures must share the base chart")
        if primal.rank != dual.rank:
            raise DegreeError("fiber ranks must agree")
        if dual.fiber_names != primal.starred_names():
            raise DegreeError(
                "dual fiber coordinates must be the starred primal names")
        for da, db in zip(primal.fiber_degrees, dual.fiber_degrees):
            if db != -da:
                raise DegreeError(
                    "dual section degrees must be opposite to the primal ones")
        self.primal = primal
        self.dual = dual
        self.chart = primal.symplectic_chart()
        self.twin = twin_chart(self.chart)
        self.legendre = legendre(self.chart)

    def hamiltonians(self) -> Tuple[Hamiltonian, Hamiltonian]:
        mu = hamiltonian_of_algebroid(self.primal, self.chart)
        mu_dual = hamiltonian_of_algebroid(self.dual, self.twin)
        return mu, mu_dual

    def __repr__(self):
        return f"BialgebroidSpec({self.primal!r}, {self.dual!r})"


@dataclass
class LinftyHamiltonian:
    """A degree-three Hamiltonian on T*[2]V[1] with a formal-parameter cap.

    Construction does not enforce the homotopy-structure conditions; use
    check_linfty, which itemizes every violation.
    """

    chart: SymplecticChart
    body: GPoly
    hbar_cap: int = 4

    def __post_init__(self):
        if self.body.chart != self.chart.chart:
            raise ChartMismatch("body must live on the symplectic chart")

    def classification(self):
        return Hamiltonian(self.chart, self.body).classification()


def assemble_hamiltonian(b: BialgebroidSpec, hbar_cap: int = 4) -> LinftyHamiltonian:
    """chi = mu + L*(mu_dual); linear-quadratic in the momenta."""
    mu, mu_dual = b.hamiltonians()
    chi = mu.body + b.legendre.pullback(mu_dual.body)
    return LinftyHamiltonian(b.chart, chi, hbar_cap)


def check_linfty(lham: LinftyHamiltonian) -> Report:
    """Degree-three homogeneity, the two vanishing conditions, integrability."""
    report = Report("homotopy-structure")
    body = lham.body
    chart = lham.chart.chart
    kinds = chart.kinds
    report.add("degree-three", "chi is homogeneous of degree 3",
               passed=body.is_homogeneous(3),
               detail=f"degree={body.degree()}")
    bad_zero = body.component(
        lambda m: not any(e and kinds[i] in MOMENTUM_KINDS
                          for i, e in enumerate(m)))
    report.add("vanish-on-zero-section",
               "every monomial carries a momentum variable", bad_zero)
    bad_base = body.component(
        lambda m: not any(e and kinds[i] in FIBER_DIRECTION_KINDS
                          for i, e in enumerate(m)))
    report.add("vanish-over-base",
               "every monomial carries a fiber-direction variable", bad_base)
    residual = canonical_bracket(body, body, lham.chart)
    report.add("integrable", "{chi, chi} = 0", residual)
    return report


def check_bialgebroid(b: BialgebroidSpec) -> Report:
    """{chi, chi} = 0 cross-checked against the derivation identity
    d([X,Y]) = [dX, Y] + [X, dY] on all generator pairs."""
    report = Report("bialgebroid")
    rep_primal = check_algebroid(b.primal)
    rep_dual = check_algebroid(b.dual)
    report.add("primal-structure", "primal data passes the algebroid checks",
               passed=rep_primal.passed)
    report.add("dual-structure", "dual data passes the algebroid checks",
               passed=rep_dual.passed)

    chi = assemble_hamiltonian(b)
    residual = canonical_bracket(chi.body, chi.body, b.chart)
    bracket_ok = residual.is_zero()
    report.add("chi-squared", "{chi, chi} = 0", residual)

    # derivation identity on basis-section pairs; sections are the starred
    # symbols of the primal multivector chart, which is the dual spec's
    # function chart.  (On arity-zero arguments the graded identity carries
    # an extra sign, so only section pairs are the displayed identity.)
    compat_ok = True
    if b.primal.is_classical():
        mv = b.primal.multivector_chart()
        spec, dual = b.primal, b.dual

        def d_star(p):
            return ce_differential(dual, p, b.twin)

        labels = list(spec.starred_names())
        gens = [mv.var_poly(n) for n in labels]
        for i, (la, pa) in enumerate(zip(labels, gens)):
            for lb, pb in zip(labels[i:], gens[i:]):
                lhs = d_star(schouten_bracket(spec, pa, pb))
                rhs = (schouten_bracket(spec, d_star(pa), pb)
                       + schouten_bracket(spec, pa, d_star(pb)))
                res = lhs - rhs
                ok = res.is_zero()
                compat_ok = compat_ok and ok
                report.add(f"compatibility({la},{lb})",
                           "d([X,Y]) = [dX, Y] + [X, dY]", res)
        report.add("routes-agree",
                   "({chi,chi} = 0) iff the derivation identity holds",
                   passed=(bracket_ok == (compat_ok and rep_primal.passed
                                          and rep_dual.passed)),
                   detail=f"hamiltonian={'pass' if bracket_ok else 'fail'}, "
                          f"identity={'pass' if compat_ok else 'fail'}")
    else:
        report.add("routes-agree",
                   "derivation-identity route runs on classical data only",
                   passed=True, detail="skipped")
    return report


def legendre_quadratic_check(b: BialgebroidSpec) -> Report:
    """The pullback of the dual Hamiltonian through the Legendre exchange
    equals the fiberwise-quadratic form of the dual structure functions,
    assembled directly on the primal chart:

        xi*_a A^i_a(x) x*_i  -  1/2 C_c^{ab}(x) xi*_a xi*_b xi^c
    """
    report = Report("legendre-quadratic")
    _, mu_dual = b.hamiltonians()
    via_legendre = b.legendre.pullback(mu_dual.body)

    C = b.chart.chart
    dual = b.dual
    direct = C.zero()
    stars = dual.fiber_names           # starred symbols, momenta on the chart
    plain = b.primal.fiber_names
    for a, an in enumerate(stars):
        for i, xv in enumerate(dual.base.vars):
            entry = dual.anchor[a][i]
            if entry.is_zero():
                continue
            mom = b.chart.momentum_of(xv.name).name
            direct = direct + C.var_poly(an) * inject(entry, C) * C.var_poly(mom)
    half = Fraction(-1, 2)
    for (a, bb), row in dual.structure.items():
        for c, centry in row.items():
            direct = direct + half * (inject(centry, C)
                                      * C.var_poly(stars[a])
                                      * C.var_poly(stars[bb])
                                      * C.var_poly(plain[c]))
    report.add("quadratic-form",
               "Legendre pullback of the dual Hamiltonian equals the direct "
               "quadratic assembly", via_legendre - direct)
    return report


# -- the operator action --------------------------------------------------------


def hamiltonian_action(lham, g: GPoly, hbar_cap: Optional[int] = None) -> GPoly:
    """Act on a function of V[1] by normal-ordered operator substitution.

    Each monomial c * U * p_{j1}...p_{jk} of the Hamiltonian contributes
    c * hbar^{k-1} * U * (d_{j1} ... d_{jk} g); for momentum-weight-one
    Hamiltonians this is exactly {H, g}.  The result lives on the V[1]
    chart extended by the formal parameter.
    """
    if isinstance(lham, LinftyHamiltonian):
        sc, body = lham.chart, lham.body
        cap = lham.hbar_cap if hbar_cap is None else hbar_cap
    elif isinstance(lham, Hamiltonian):
        sc, body, cap = lham.chart, lham.body, hbar_cap
    else:
        sc, body = lham
        cap = hbar_cap
    ce = Chart([(v.name, v.degree, v.kind) for v in sc.base_chart.vars],
               trunc=sc.base_chart.trunc)
    if g.chart != ce:
        raise ChartMismatch("the action takes momentum-free arguments")
    out_chart = with_formal_parameter(ce)
    hb = out_chart.var_poly(HBAR)
    npairs = sc.npairs
    out = out_chart.zero()
    for mono, coeff in body.terms.items():
        momentum_part = [(j, e) for j, e in enumerate(mono[npairs:]) if e]
        k = sum(e for _, e in momentum_part)
        if k == 0:
            continue
        deriv = g
        # strip the momentum tail right to left: zero extra Koszul signs
        for j, e in reversed(momentum_part):
            for _ in range(e):
                deriv = partial_left(deriv, ce.names[j])
                if deriv.is_zero():
                    break
            if deriv.is_zero():
                break
        if deriv.is_zero():
            continue
        u = GPoly(ce, {mono[:npairs]: coeff})
        term = inject(u * deriv, out_chart) * hb ** (k - 1)
        out = out + term
    if cap is not None:
        out = truncate_formal(out, cap)
    return out


def taylor(g: GPoly, cap: int, nbase: Optional[int] = None) -> dict:
    """The coefficient table of g about the zero section: fiber word ->
    base-coefficient polynomial, up to word weight cap.

    Words are monomials in the non-base coordinates of g's chart (base
    exponents zeroed); the normalization is the plain monomial coefficient.
    """
    chart = g.chart
    if nbase is None:
        nbase = sum(1 for v in chart.vars if v.kind == KIND_BASE)
    if any(v.kind == KIND_BASE for v in chart.vars[nbase:]):
        raise ChartMismatch("base coordinates must precede fiber coordinates")
    table = {}
    for m, c in g.terms.items():
        word = (0,) * nbase + m[nbase:]
        if sum(m[nbase:]) > cap:
            continue
        base_part = m[:nbase] + (0,) * (len(m) - nbase)
        entry = table.setdefault(word, {})
        entry[base_part] = entry.get(base_part, Fraction(0)) + c
    return {w: GPoly(chart, terms) for w, terms in sorted(table.items())}


# -- morphisms -------------------------------------------------------------------


def semistrict_morphism_check(f: PolyMap, ham_source, ham_target) -> Report:
    """Verify F*(target Hamiltonian) = Phi*(source Hamiltonian).

    F* substitutes the coordinates of the target V[1]-chart by their images
    and keeps target momenta; Phi* substitutes every source momentum by the
    left-derivative Jacobian pairing  p_i -> sum_j (d_i f^j) p_j.  Both land
    on the mixed chart (source coordinates, target momenta).
    """
    sc_v: SymplecticChart = ham_source.chart
    sc_w: SymplecticChart = ham_target.chart
    ce_v = sc_v.base_chart
    ce_w = sc_w.base_chart
    if f.source != ce_v or f.target != ce_w:
        raise ChartMismatch("the map must go between the V[1] charts")
    report = Report("morphism")

    if ce_v != ce_w:
        shared = set(ce_v.names) & set(ce_w.names)
        if shared:
            raise ChartMismatch(
                f"source and target coordinate names overlap: {sorted(shared)}")

    mixed = Chart(
        [(v.name, v.degree, v.kind) for v in ce_v.vars]
        + [(v.name, v.degree, v.kind) for v in sc_w.momenta()],
        trunc=ce_v.trunc)

    # F* : substitute W[1]-coordinates, keep W-momenta
    f_assign = {}
    for v in ce_w.vars:
        f_assign[v.name] = inject(f.image_of(v.name), mixed)
    f_star = substitute(ham_target.body, f_assign, target=mixed)

    # Phi* : substitute V-momenta by the Jacobian pairing
    phi_assign = {}
    for q in ce_v.vars:
        p_name = sc_v.momentum_of(q.name).name
        img = mixed.zero()
        for w in ce_w.vars:
            jac = partial_left(f.image_of(w.name), q.name)
            if jac.is_zero():
                continue
            p_w = sc_w.momentum_of(w.name).name
            img = img + inject(jac, mixed) * mixed.var_poly(p_w)
        phi_assign[p_name] = img
    phi_star = substitute(ham_source.body, phi_assign, target=mixed)

    report.add("hamiltonian-relation",
               "pullback of the target Hamiltonian equals the momentum-"
               "Jacobian pullback of the source Hamiltonian",
               f_star - phi_star)
    return report


@dataclass
class FullMorphism:
    """A weight-truncated morphism table V[1] -> S(W[1]).

    `base_map` assigns target base coordinates; `words` assigns to each
    graded-symmetric word in the target fiber coordinates (an exponent
    tuple over the target V[1] chart with base entries zero) its pullback, a
    polynomial on the source V[1] chart.  All entries are degree-preserving
    and basepoint-preserving.
    """

    source: Chart
    target: Chart
    base_map: Mapping[str, GPoly]
    words: Mapping[tuple, GPoly]
    cap: int

    def __post_init__(self):
        base_map = {}
        for name, img in self.base_map.items():
            v = self.target.var(name)
            if v.kind != KIND_BASE:
                raise ChartMismatch(f"{name!r} is not a base coordinate")
            if img.chart != self.source:
                raise ChartMismatch("entries live on the source chart")
            if not img.is_homogeneous(v.degree) or img.constant_term() != 0:
                raise DegreeMismatch(
                    f"base entry {name!r} must be homogeneous of degree "
                    f"{v.degree} with zero constant term")
            base_map[name] = img
        self.base_map = base_map
        words = {}
        kinds = self.target.kinds
        src_kinds = self.source.kinds
        for word, img in self.words.items():
            word = tuple(word)
            if len(word) != len(self.target.vars):
                raise ChartMismatch("word length does not match the target chart")
            if any(e and kinds[i] == KIND_BASE for i, e in enumerate(word)):
                raise ChartMismatch("words range over fiber coordinates only")
            if img.chart != self.source:
                raise ChartMismatch("entries live on the source chart")
            want = self.target.monomial_degree(word)
            if not img.is_homogeneous(want):
                raise DegreeMismatch(
                    f"word entry {word} must be homogeneous of degree {want}")
            for m in img.terms:
                if not any(e and src_kinds[i] != KIND_BASE
                           for i, e in enumerate(m)):
                    raise DegreeMismatch(
                        "word entries must vanish on the zero section")
            words[word] = img
        self.words = words

    def pull_base(self, p: GPoly) -> GPoly:
        """Pull back a base-coefficient polynomial through the base map."""
        return substitute(p, dict(self.base_map), target=self.source)

    def pull_taylor(self, g: GPoly) -> GPoly:
        """Apply f* after the Taylor expansion of g about the zero section."""
        out = self.source.zero()
        for word, coeff in taylor(g, self.cap).items():
            pulled_coeff = self.pull_base(coeff)
            if pulled_coeff.is_zero():
                continue
            if not any(word):
                out = out + pulled_coeff
                continue
            img = self.words.get(word)
            if img is None:
                raise TruncationIncomplete(
                    f"missing word {word} below the weight cap {self.cap}")
            out = out + pulled_coeff * img
        return out


def embed_semistrict(f: PolyMap, cap: int) -> FullMorphism:
    """A chart morphism as a table: word entries multiply the weight-one
    images, base entries are the base-coordinate images."""
    base_map = {v.name: f.image_of(v.name) for v in f.target.vars
                if v.kind == KIND_BASE}
    words = {}
    from .gpoly import enumerate_monomials
    fiber_idx = [i for i, v in enumerate(f.target.vars) if v.kind != KIND_BASE]
    for word in enumerate_monomials(f.target, cap, max_base_degree=0):
        if not any(word) or sum(word) > cap:
            continue
        if any(e and i not in fiber_idx for i, e in enumerate(word)):
            continue
        img = f.source.one()
        for i, e in enumerate(word):
            for _ in range(e):
                img = img * f.image_of(f.target.names[i])
        if img:
            words[word] = img
    return FullMorphism(f.source, f.target, base_map, words, cap)


def linfty_morphism_check(fm: FullMorphism, lham_source: LinftyHamiltonian,
                          lham_target: LinftyHamiltonian,
                          cap: Optional[int] = None) -> Report:
    """Verify the operator identity (source action) o f* o T = f* o T o
    (target action), truncating words and formal-parameter powers at the cap.

    The identity is evaluated on every monomial of the target function chart
    up to the weight cap (with base exponents at most one), not only on the
    coordinate generators: second derivatives vanish on linear arguments, so
    generators alone cannot see the higher operations.
    """
    cap = fm.cap if cap is None else cap
    report = Report("homotopy-morphism")
    ce_v = Chart([(v.name, v.degree, v.kind)
                  for v in lham_source.chart.base_chart.vars])
    ce_w = Chart([(v.name, v.degree, v.kind)
                  for v in lham_target.chart.base_chart.vars])
    if fm.source != ce_v or fm.target != ce_w:
        raise ChartMismatch("table endpoints must be the V[1] charts")
    out_chart = with_formal_parameter(ce_v)

    from .gpoly import enumerate_monomials, render_monomial
    arguments = [m for m in enumerate_monomials(ce_w, cap, max_base_degree=1)
                 if any(m)]
    for mono in arguments:
        name = render_monomial(ce_w, mono)
        g = GPoly(ce_w, {mono: Fraction(1)})
        # left side: act downstairs after pulling back
        lhs = hamiltonian_action(lham_source, fm.pull_taylor(g), hbar_cap=cap)
        # right side: act upstairs, expand in the formal parameter, pull back
        acted = hamiltonian_action(lham_target, g, hbar_cap=cap)
        hb_idx = acted.chart.index_of(HBAR)
        rhs = out_chart.zero()
        for power, piece in acted.split_by(lambda m: m[hb_idx]).items():
            # strip the formal parameter before the Taylor pullback
            stripped = GPoly(ce_w, {m[:len(ce_w.vars)]: c
                                    for m, c in piece.terms.items()})
            pulled = fm.pull_taylor(stripped)
            rhs = rhs + (inject(pulled, out_chart)
                         * out_chart.var_poly(HBAR) ** power)
        rhs = truncate_formal(rhs, cap)
        lhs = truncate_formal(inject(lhs, out_chart), cap)
        report.add(f"generator({name})",
                   "operator identity on the generator", lhs - rhs)
    return report


def big_bracket(t1: GPoly, t2: GPoly, sc: SymplecticChart) -> GPoly:
    """The canonical degree -2 bracket on the double chart over a point."""
    if any(v.kind == KIND_BASE for v in sc.coords()):
        raise ChartMismatch("the double bracket lives over a point")
    return canonical_bracket(t1, t2, sc)
