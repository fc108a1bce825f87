"""Shifted cotangent charts and the canonical graded Poisson bracket.

A chart T*[n]X lists the coordinates q^i first (base, then fiber) and the
momenta p_i after them, paired index to index with |p_i| + |q^i| = n.  The
bracket is defined by the relations {p_i, q^j} = delta_i^j,
{q^i, q^j} = {p_i, p_j} = 0, extended as a biderivation through

    {f, g*h} = {f,g}*h + (-1)^{(|f|-n)|g|} g*{f,h}
    {f*g, h} = f*{g,h} + (-1)^{|g|(|h|-n)} {f,h}*g

with no closed sign formula anywhere: term-level signs come from these two
rules alone.  The same extension engine drives every other bracket in the
package (Schouten, Lie-Poisson), each from its own generator table.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence

from .errors import ChartMismatch, DegreeMismatch, NotSplit
from .gpoly import (
    Chart, GPoly, GVar, KIND_BASE, KIND_FIBER, KIND_MOMENTUM_BASE,
    KIND_MOMENTUM_FIBER, MOMENTUM_KINDS, inject, substitute,
)
from .report import Report


class SymplecticChart:
    """T*[n] of a graded chart: coordinates first, conjugate momenta after."""

    def __init__(self, coords: Sequence[GVar], momenta: Sequence[GVar],
                 shift: int, trunc: Optional[int] = None):
        if len(coords) != len(momenta):
            raise ChartMismatch("coordinates and momenta must pair up")
        for q, p in zip(coords, momenta):
            if q.degree + p.degree != shift:
                raise DegreeMismatch(
                    f"|{p.name}| + |{q.name}| must equal {shift}")
        self.shift = shift
        self.npairs = len(coords)
        self.chart = Chart(
            [(v.name, v.degree, v.kind) for v in coords]
            + [(v.name, v.degree, v.kind) for v in momenta], trunc=trunc)
        self.base_chart = Chart([(v.name, v.degree, v.kind) for v in coords],
                                trunc=trunc)

    def __eq__(self, other):
        return (isinstance(other, SymplecticChart) and self.chart == other.chart
                and self.shift == other.shift)

    def __hash__(self):
        return hash((self.chart, self.shift))

    def __repr__(self):
        return f"SymplecticChart(n={self.shift}, {self.chart!r})"

    def coords(self):
        return self.chart.vars[:self.npairs]

    def momenta(self):
        return self.chart.vars[self.npairs:]

    def partner_index(self, k: int) -> int:
        return k + self.npairs if k < self.npairs else k - self.npairs

    def momentum_of(self, name: str) -> GVar:
        k = self.chart.index_of(name)
        if k >= self.npairs:
            raise ChartMismatch(f"{name!r} is already a momentum")
        return self.chart.vars[k + self.npairs]

    def momentum_weight(self, poly: GPoly) -> frozenset:
        return poly.kind_weights(MOMENTUM_KINDS)

    def zero_momenta(self, poly: GPoly) -> GPoly:
        """Restrict to the zero section: drop every monomial with a momentum."""
        n = self.npairs
        return poly.component(lambda m: not any(m[n:]))


def shifted_cotangent(base: Chart, n: int,
                      momentum_names: Optional[Sequence[str]] = None) -> SymplecticChart:
    """Build T*[n] of `base`, generating momenta named `q*` by default."""
    for v in base.vars:
        if v.kind not in (KIND_BASE, KIND_FIBER):
            raise NotSplit("base chart of a cotangent bundle takes base/fiber "
                           "coordinates only")
    if momentum_names is None:
        momentum_names = [v.name + "*" for v in base.vars]
    if len(momentum_names) != len(base.vars):
        raise ChartMismatch("one momentum name per coordinate")
    taken = set(base.names)
    momenta = []
    for v, name in zip(base.vars, momentum_names):
        if name in taken:
            raise ChartMismatch(f"momentum name collision: {name!r}")
        taken.add(name)
        kind = KIND_MOMENTUM_BASE if v.kind == KIND_BASE else KIND_MOMENTUM_FIBER
        momenta.append(GVar(name, n - v.degree, kind))
    return SymplecticChart(base.vars, momenta, n, trunc=base.trunc)


def _split_base_fiber(sc: SymplecticChart):
    base = [v for v in sc.coords() if v.kind == KIND_BASE]
    fiber = [v for v in sc.coords() if v.kind == KIND_FIBER]
    if len(base) + len(fiber) != sc.npairs:
        raise NotSplit("chart lacks the base/fiber partition")
    order = [v.kind for v in sc.coords()]
    if order != sorted(order, key=lambda k: 0 if k == KIND_BASE else 1):
        raise NotSplit("base coordinates must precede fiber coordinates")
    return base, fiber


def twin_chart(sc: SymplecticChart) -> SymplecticChart:
    """The Legendre twin: fiber coordinates and their momenta swap roles.

    For T*[n]V[1] with coordinates (x, xi, x*, xi*) the twin is T*[n]V*[1]
    with coordinates (x, xi*) and momenta (x*, xi); variable names are reused
    and only their roles change.
    """
    base, fiber = _split_base_fiber(sc)
    mom = {v.name: sc.momentum_of(v.name) for v in sc.coords()}
    coords = list(base) + [GVar(mom[v.name].name, mom[v.name].degree, KIND_FIBER)
                           for v in fiber]
    momenta = ([GVar(mom[v.name].name, mom[v.name].degree, KIND_MOMENTUM_BASE)
                for v in base]
               + [GVar(v.name, v.degree, KIND_MOMENTUM_FIBER) for v in fiber])
    return SymplecticChart(coords, momenta, sc.shift, trunc=sc.chart.trunc)


# -- the biderivation extension engine ---------------------------------------


def biderivation_bracket(f: GPoly, g: GPoly, shift: int,
                         pair: Callable[[int, int], Optional[GPoly]]) -> GPoly:
    """Extend a generator table to a bracket of degree -shift.

    `pair(k, l)` returns {v_k, v_l} for chart indices k, l (None for zero).
    The extension applies the two Leibniz rules recursively; it never uses a
    closed sign formula.
    """
    chart = f.chart
    if g.chart != chart:
        raise ChartMismatch("bracket operands live on different charts")
    degs = chart.degrees
    zero = chart.zero()
    nvars = len(degs)

    def mono_degree(m):
        return sum(e * d for e, d in zip(m, degs))

    def var_poly(k):
        exps = [0] * nvars
        exps[k] = 1
        return GPoly(chart, {tuple(exps): Fraction(1)})

    def mono_poly(m):
        return GPoly(chart, {m: Fraction(1)})

    vb_memo = {}

    def vbracket(k, m2):
        # {v_k, m2} by peeling the first variable of m2
        key = (k, m2)
        if key in vb_memo:
            return vb_memo[key]
        first = next((i for i, e in enumerate(m2) if e), None)
        if first is None:
            out = zero
        else:
            rest = m2[:first] + (m2[first] - 1,) + m2[first + 1:]
            head = pair(k, first)
            out = zero
            if head is not None and head:
                out = out + head * mono_poly(rest)
            s = (degs[k] - shift) * degs[first]
            tail = vbracket(k, rest)
            if tail:
                tail = var_poly(first) * tail
                out = out + (-tail if s % 2 else tail)
        vb_memo[key] = out
        return out

    mb_memo = {}

    def mbracket(m1, m2):
        # {m1, m2} by peeling the first variable of m1
        key = (m1, m2)
        if key in mb_memo:
            return mb_memo[key]
        first = next((i for i, e in enumerate(m1) if e), None)
        if first is None:
            out = zero
        else:
            rest = m1[:first] + (m1[first] - 1,) + m1[first + 1:]
            out = zero
            t1 = mbracket(rest, m2)
            if t1:
                out = out + var_poly(first) * t1
            t2 = vbracket(first, m2)
            if t2:
                s = mono_degree(rest) * (mono_degree(m2) - shift)
                t2 = t2 * mono_poly(rest)
                out = out + (-t2 if s % 2 else t2)
        mb_memo[key] = out
        return out

    out = zero
    for m1, c1 in f.terms.items():
        for m2, c2 in g.terms.items():
            t = mbracket(m1, m2)
            if t:
                out = out + (c1 * c2) * t
    return out


@dataclass(frozen=True)
class BracketContext:
    """A chart together with a bracket on it, for Poisson-map checking."""

    label: str
    chart: Chart
    shift: int
    bracket: Callable[[GPoly, GPoly], GPoly]


def canonical_bracket(f: GPoly, g: GPoly, sc: SymplecticChart) -> GPoly:
    """The canonical degree-(-n) bracket of T*[n], {p_i, q^j} = delta_i^j."""
    if f.chart != sc.chart or g.chart != sc.chart:
        raise ChartMismatch("operands must live on the symplectic chart")
    n = sc.shift
    degs = sc.chart.degrees
    npairs = sc.npairs

    def pair(k, l):
        if k >= npairs and l < npairs:            # {p, q}
            return sc.chart.one() if k - npairs == l else None
        if k < npairs and l >= npairs and l - npairs == k:   # {q, p}
            s = (degs[k] - n) * (degs[l] - n)
            one = sc.chart.one()
            return one if s % 2 else -one
        return None

    return biderivation_bracket(f, g, n, pair)


def canonical_context(sc: SymplecticChart, label: str = "canonical") -> BracketContext:
    return BracketContext(label, sc.chart, sc.shift,
                          lambda f, g: canonical_bracket(f, g, sc))


# -- Hamiltonians -------------------------------------------------------------


class Hamiltonian:
    """A polynomial on a shifted cotangent chart with derived classification."""

    def __init__(self, chart: SymplecticChart, body: GPoly):
        if body.chart != chart.chart:
            raise ChartMismatch("body must live on the symplectic chart")
        self.chart = chart
        self.body = body

    def classification(self):
        """(total degree or None, momentum weights, fiber weights): always
        recomputed from the body."""
        return (self.body.degree(),
                self.body.kind_weights(MOMENTUM_KINDS),
                self.body.kind_weights((KIND_FIBER,)))

    def __eq__(self, other):
        return (isinstance(other, Hamiltonian) and self.chart == other.chart
                and self.body == other.body)

    def __repr__(self):
        return f"Hamiltonian({self.body!r})"


def hamiltonian_lift(sc: SymplecticChart, components: Mapping[str, GPoly]) -> GPoly:
    """Lift a vector field Q = sum Q^i d/dq^i to mu_Q = sum Q^i p_i."""
    out = sc.chart.zero()
    for name, comp in components.items():
        if comp.is_zero():
            continue
        q = inject(comp, sc.chart)
        out = out + q * sc.chart.var_poly(sc.momentum_of(name).name)
    return out


def is_integrable(ham: Hamiltonian):
    """Return ({H, H}, {H, H} == 0)."""
    residual = canonical_bracket(ham.body, ham.body, ham.chart)
    return residual, residual.is_zero()


# -- polynomial maps ----------------------------------------------------------


class PolyMap:
    """A graded-manifold morphism in coordinates: each target coordinate is
    assigned a source polynomial of the same degree, with zero constant term
    (basepoints go to basepoints); fiber-direction targets pull back to
    polynomials with no base-only monomials."""

    def __init__(self, source: Chart, target: Chart,
                 assignment: Mapping[str, GPoly]):
        self.source = source
        self.target = target
        self.assignment = {}
        for key, img in assignment.items():
            name = key if isinstance(key, str) else key.name
            tv = target.var(name)
            if img.chart != source:
                raise ChartMismatch(
                    f"image of {name!r} must live on the source chart")
            if not img.is_homogeneous(tv.degree):
                raise DegreeMismatch(
                    f"image of {name!r} must be homogeneous of degree {tv.degree}")
            if img.constant_term() != 0:
                raise DegreeMismatch(
                    f"image of {name!r} must preserve the basepoint "
                    "(zero constant term)")
            if tv.kind != KIND_BASE:
                src_kinds = source.kinds
                for m in img.terms:
                    if not any(e and src_kinds[i] != KIND_BASE
                               for i, e in enumerate(m)):
                        raise DegreeMismatch(
                            f"image of {name!r} must vanish on the zero section")
            self.assignment[name] = img
        for tv in target.vars:
            if tv.name not in self.assignment:
                if not source.has(tv.name) or source.var(tv.name).degree != tv.degree:
                    raise DegreeMismatch(
                        f"target coordinate {tv.name!r} has no assignment and no "
                        "same-degree source counterpart")

    def image_of(self, name: str) -> GPoly:
        img = self.assignment.get(name)
        if img is None:
            img = self.source.var_poly(name)
        return img

    def pullback(self, poly: GPoly) -> GPoly:
        if poly.chart != self.target:
            raise ChartMismatch("pullback input must live on the target chart")
        return substitute(poly, self.assignment, target=self.source)

    def then(self, other: "PolyMap") -> "PolyMap":
        """Composition: self followed by other (source -> other.target)."""
        if other.source != self.target:
            raise ChartMismatch("charts do not compose")
        assignment = {v.name: self.pullback(other.image_of(v.name))
                      for v in other.target.vars}
        return PolyMap(self.source, other.target, assignment)

    def is_identity(self) -> bool:
        if self.source != self.target:
            return False
        return all(self.image_of(v.name) == self.source.var_poly(v.name)
                   for v in self.target.vars)

    def __repr__(self):
        inner = ", ".join(f"{v.name} -> {self.image_of(v.name)!r}"
                          for v in self.target.vars)
        return f"PolyMap({inner})"


def legendre(sc: SymplecticChart) -> PolyMap:
    """The coordinate exchange identifying T*[n]V[1] with T*[n]V*[1].

    On a classical chart this is (x, xi, x*, xi*) -> (x, xi*, x*, xi); for a
    fiber coordinate of even degree the momentum leg carries the sign that
    keeps the pullback a bracket morphism.
    """
    base, fiber = _split_base_fiber(sc)
    twin = twin_chart(sc)
    assignment = {}
    for v in base:
        assignment[v.name] = sc.chart.var_poly(v.name)
        mom = sc.momentum_of(v.name).name
        assignment[mom] = sc.chart.var_poly(mom)
    for v in fiber:
        mom = sc.momentum_of(v.name).name
        assignment[mom] = sc.chart.var_poly(mom)   # twin fiber coordinate
        img = sc.chart.var_poly(v.name)            # twin momentum of that fiber
        if v.parity == 0:
            img = -img
        assignment[v.name] = img
    return PolyMap(sc.chart, twin.chart, assignment)


def check_poisson_map(f: PolyMap, src: BracketContext,
                      tgt: BracketContext) -> Report:
    """Verify f*{a,b}_tgt = {f*a, f*b}_src on all target generator pairs."""
    if f.source != src.chart or f.target != tgt.chart:
        raise ChartMismatch("map endpoints do not match the bracket contexts")
    report = Report(f"poisson-map {src.label} -> {tgt.label}")
    names = tgt.chart.names
    for i, a in enumerate(names):
        for b in names[i:]:
            pa, pb = tgt.chart.var_poly(a), tgt.chart.var_poly(b)
            lhs = f.pullback(tgt.bracket(pa, pb))
            rhs = src.bracket(f.pullback(pa), f.pullback(pb))
            report.add(f"pair({a},{b})",
                       "pullback of {a,b} equals {pullback a, pullback b}",
                       lhs - rhs)
    return report
