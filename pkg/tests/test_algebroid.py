import itertools
import random
from fractions import Fraction

import pytest

from corpus import (FAILING, LINE, PASSING, PLANE, POINT, abelian,
                    action_on_line, heisenberg, koszul_constant,
                    koszul_linear, two_dim_algebra)

from algebroids.algebroid import (AlgebroidSpec, adjoint_line_connection,
                                  anchor_of, apply_anchor, basis_section,
                                  bv_operator, ce_differential,
                                  check_algebroid, contraction, curvature,
                                  hamiltonian_of_algebroid, koszul_algebroid,
                                  lie_derivative, lie_poisson, line_connection,
                                  multivector_arity, schouten_bracket,
                                  schouten_context, section_bracket,
                                  section_to_multivector, tangent_spec,
                                  torsion)
from algebroids.errors import DegreeError, NotPoisson
from algebroids.expr import parse_expression as pe
from algebroids.gpoly import Chart, partial_left, random_poly
from algebroids.symplectic import canonical_bracket, check_poisson_map


class TestSpecValidation:
    def test_degree_checks(self):
        graded = Chart([("t", 2)])
        with pytest.raises(DegreeError):
            # anchor entries must be homogeneous of degree d_a + |x^i|
            AlgebroidSpec(graded, [("xi1", 0)], {("xi1", "t"): 1}, {})
        with pytest.raises(DegreeError):
            AlgebroidSpec(POINT, [("xi1", 0), ("xi2", 0)], {},
                          {("xi2", "xi1", "xi1"): 1})

    def test_antisymmetric_completion(self):
        spec = two_dim_algebra()
        assert spec.structure_entry(0, 1, 0) == POINT.const(1)
        assert spec.structure_entry(1, 0, 0) == POINT.const(-1)

    def test_even_diagonal_rejected(self):
        with pytest.raises(DegreeError):
            AlgebroidSpec(POINT, [("xi1", 0)], {}, {("xi1", "xi1", "xi1"): 1})

    def test_mixed_parity_component_rejected(self):
        with pytest.raises(DegreeError):
            AlgebroidSpec(POINT, [("a", 0), ("b", 1), ("c", 1)], {},
                          {("a", "b", "c"): 1})


class TestHamiltonianOfAlgebroid:
    def test_tangent_line(self):
        mu = hamiltonian_of_algebroid(tangent_spec(LINE))
        assert mu.body == pe("dx * x*", mu.chart.chart)
        degree, mom, fib = mu.classification()
        assert degree == 3 and mom == frozenset({1})

    def test_two_dim_algebra_frozen_sign(self):
        # the bracket relations force mu = -1/2 C xi xi xi*; frozen here
        mu = hamiltonian_of_algebroid(two_dim_algebra())
        assert mu.body == pe("-xi1 * xi2 * xi1*", mu.chart.chart)

    def test_poisson_algebroid_matches_displayed_formula(self):
        mu = hamiltonian_of_algebroid(koszul_linear())
        expected = pe("x1 * xi2 * x1* - x1 * xi1 * x2* + xi1 * xi2 * xi1*",
                      mu.chart.chart)
        assert mu.body == expected

    def test_momentum_weight_one_and_fiber_vanishing(self):
        for build in PASSING.values():
            mu = hamiltonian_of_algebroid(build())
            if mu.body.is_zero():
                continue
            degree, mom, _ = mu.classification()
            assert degree == 3
            assert mom == frozenset({1})


class TestCheckAlgebroid:
    def test_passing_corpus(self):
        for name, build in PASSING.items():
            report = check_algebroid(build())
            assert report.passed, f"{name} unexpectedly failed"

    def test_failing_corpus(self):
        for name, build in FAILING.items():
            report = check_algebroid(build())
            assert not report.passed, f"{name} unexpectedly passed"

    def test_routes_agree_everywhere(self):
        for build in list(PASSING.values()) + list(FAILING.values()):
            report = check_algebroid(build())
            routes = [r for r in report.records if r.name == "routes-agree"]
            assert routes and routes[0].passed

    def test_broken_constants_jacobiator(self):
        report = check_algebroid(FAILING["broken-constants"]())
        failing = {r.name for r in report.failures()}
        assert "jacobi(xi1,xi2,xi3)" in failing
        rec = next(r for r in report.records
                   if r.name == "jacobi(xi1,xi2,xi3)")
        assert rec.residual == "xi2*"


class TestCEDifferential:
    def test_de_rham(self):
        spec = tangent_spec(LINE)
        ce = spec.ce_chart()
        assert ce_differential(spec, pe("x", ce)) == pe("dx", ce)

    def test_two_dim_dual_generator(self):
        spec = two_dim_algebra()
        ce = spec.ce_chart()
        assert ce_differential(spec, pe("xi1", ce)) == pe("-xi1 * xi2", ce)
        assert ce_differential(spec, pe("xi2", ce)).is_zero()

    def test_constant(self):
        spec = two_dim_algebra()
        assert ce_differential(spec, spec.ce_chart().one()).is_zero()

    def test_square_zero_on_passing_corpus(self):
        rng = random.Random(17)
        for build in PASSING.values():
            spec = build()
            ce = spec.ce_chart()
            for name in ce.names:
                assert ce_differential(
                    spec, ce_differential(spec, ce.var_poly(name))).is_zero()
            for _ in range(5):
                phi = random_poly(ce, rng, max_weight=3, max_base_degree=2)
                assert ce_differential(spec, ce_differential(spec, phi)).is_zero()

    def test_degree_plus_one(self):
        spec = koszul_linear()
        ce = spec.ce_chart()
        d = ce_differential(spec, pe("x1 * xi1", ce))
        assert d.is_homogeneous(2)


def _evaluate_form(spec, phi, sections):
    """Multilinear evaluation: contract the first argument innermost."""
    out = phi
    for x in sections:
        out = contraction(spec, x, out)
    return out


def _eq1_oracle(spec, phi, sections):
    """The alternating-sum coboundary formula on decomposable arguments."""
    from algebroids.gpoly import restrict_to
    base = spec.base
    total = base.zero()
    k = len(sections)
    for i in range(k):
        rest = sections[:i] + sections[i + 1:]
        inner = restrict_to(_evaluate_form(spec, phi, rest), base)
        total = total + ((-1) ** i) * apply_anchor(spec, sections[i], inner)
    for i in range(k):
        for j in range(i + 1, k):
            rest = [section_bracket(spec, sections[i], sections[j])] + \
                [s for l, s in enumerate(sections) if l not in (i, j)]
            total = total + ((-1) ** (i + j)) * restrict_to(
                _evaluate_form(spec, phi, rest), base)
    return total


class TestEq1Agreement:
    def test_classical_cross_check(self):
        # the bracket route {mu, -} agrees with the multilinear coboundary
        # formula on decomposable arguments for classical specs
        from algebroids.gpoly import restrict_to
        rng = random.Random(23)
        for build in (two_dim_algebra, heisenberg, action_on_line,
                      koszul_linear):
            spec = build()
            ce = spec.ce_chart()
            nbase = len(spec.base.vars)
            for _ in range(6):
                sample = random_poly(ce, rng, max_weight=2, max_base_degree=1)
                for w in (0, 1, 2):
                    phi = sample.component(lambda m: sum(m[nbase:]) == w)
                    if phi.is_zero() or spec.rank < w + 1:
                        continue
                    for idx in itertools.combinations(range(spec.rank), w + 1):
                        sections = [basis_section(spec, a) for a in idx]
                        lhs = restrict_to(_evaluate_form(
                            spec, ce_differential(spec, phi), sections),
                            spec.base)
                        assert lhs == _eq1_oracle(spec, phi, sections)


class TestCartan:
    def test_contraction_on_generators(self):
        spec = two_dim_algebra()
        ce = spec.ce_chart()
        assert contraction(spec, basis_section(spec, 0), pe("xi1 * xi2", ce)) \
            == pe("xi2", ce)

    def test_lie_derivative_de_rham(self):
        spec = tangent_spec(LINE)
        ce = spec.ce_chart()
        assert lie_derivative(spec, {"dx": LINE.one()}, pe("x", ce)) == ce.one()

    def test_cartan_commutator_identity(self):
        rng = random.Random(29)
        for build in (two_dim_algebra, heisenberg, action_on_line):
            spec = build()
            ce = spec.ce_chart()
            for a in range(spec.rank):
                for b in range(spec.rank):
                    x = basis_section(spec, a)
                    y = basis_section(spec, b)
                    for _ in range(4):
                        phi = random_poly(ce, rng, max_weight=2,
                                          max_base_degree=1)
                        lhs = lie_derivative(spec, x, contraction(spec, y, phi)) \
                            - contraction(spec, y, lie_derivative(spec, x, phi))
                        rhs = contraction(
                            spec, section_bracket(spec, x, y), phi)
                        assert lhs == rhs

    def test_lie_bracket_identity(self):
        rng = random.Random(31)
        spec = two_dim_algebra()
        ce = spec.ce_chart()
        for a in range(2):
            for b in range(2):
                x, y = basis_section(spec, a), basis_section(spec, b)
                for _ in range(4):
                    phi = random_poly(ce, rng, max_weight=2, max_base_degree=0)
                    lhs = lie_derivative(spec, x, lie_derivative(spec, y, phi)) \
                        - lie_derivative(spec, y, lie_derivative(spec, x, phi))
                    rhs = lie_derivative(spec, section_bracket(spec, x, y), phi)
                    assert lhs == rhs


class TestSchouten:
    def test_wedge_square_of_decomposable(self):
        spec = two_dim_algebra()
        mv = spec.multivector_chart()
        s = pe("xi1* * xi2*", mv)
        assert schouten_bracket(spec, s, s).is_zero()

    def test_bivector_on_plane(self):
        spec = tangent_spec(PLANE)
        mv = spec.multivector_chart()
        pi = pe("x1 * dx1* * dx2*", mv)
        assert schouten_bracket(spec, pi, pi).is_zero()

    def test_generator_function_value_frozen(self):
        # the suspension to the shifted dual chart globally negates the
        # generator table: [e_a, f] = -rho(e_a) f in this realization
        spec = action_on_line()
        mv = spec.multivector_chart()
        assert schouten_bracket(spec, pe("xi1*", mv), pe("x", mv)) == \
            pe("-1", mv)
        assert schouten_bracket(spec, pe("xi1*", mv), pe("xi2*", mv)) == \
            pe("-xi1*", mv)

    def test_graded_antisymmetry_and_jacobi(self):
        rng = random.Random(37)
        for build in (two_dim_algebra, heisenberg, koszul_linear):
            spec = build()
            mv = spec.multivector_chart()
            for _ in range(15):
                f = random_poly(mv, rng, 3, 1, 2, homogeneous=True)
                g = random_poly(mv, rng, 3, 1, 2, homogeneous=True)
                h = random_poly(mv, rng, 3, 1, 2, homogeneous=True)
                if f.is_zero() or g.is_zero() or h.is_zero():
                    continue
                df, dg = f.degree(), g.degree()
                sign = -1 if ((df - 1) * (dg - 1)) % 2 else 1
                assert schouten_bracket(spec, f, g) == \
                    -sign * schouten_bracket(spec, g, f)
                jac_sign = -1 if ((df - 1) * (dg - 1)) % 2 else 1
                lhs = schouten_bracket(spec, f, schouten_bracket(spec, g, h))
                rhs = schouten_bracket(spec, schouten_bracket(spec, f, g), h) \
                    + jac_sign * schouten_bracket(
                        spec, g, schouten_bracket(spec, f, h))
                assert lhs == rhs

    def test_biderivation(self):
        rng = random.Random(41)
        spec = koszul_linear()
        mv = spec.multivector_chart()
        for _ in range(10):
            f = random_poly(mv, rng, 2, 1, 2, homogeneous=True)
            g = random_poly(mv, rng, 2, 1, 2, homogeneous=True)
            h = random_poly(mv, rng, 2, 1, 2, homogeneous=True)
            if f.is_zero() or g.is_zero():
                continue
            df, dg = f.degree(), g.degree()
            sign = -1 if ((df - 1) * dg) % 2 else 1
            assert schouten_bracket(spec, f, g * h) == \
                schouten_bracket(spec, f, g) * h + \
                sign * (g * schouten_bracket(spec, f, h))

    def test_arity(self):
        spec = two_dim_algebra()
        mv = spec.multivector_chart()
        assert multivector_arity(spec, pe("xi1* * xi2*", mv)) == frozenset({2})


class TestLiePoisson:
    def test_kostant_kirillov(self):
        ctx = lie_poisson(two_dim_algebra())
        u1 = ctx.chart.var_poly("xi1*")
        u2 = ctx.chart.var_poly("xi2*")
        assert ctx.bracket(u1, u2) == u1

    def test_base_functions_commute(self):
        ctx = lie_poisson(action_on_line())
        f = ctx.chart.var_poly("x")
        assert ctx.bracket(f, f * f).is_zero()

    def test_jacobi_fails_for_broken_spec(self):
        ctx = lie_poisson(FAILING["broken-constants"]())
        c = ctx.chart
        u = [c.var_poly(f"xi{i}*") for i in (1, 2, 3)]
        jac = ctx.bracket(u[0], ctx.bracket(u[1], u[2])) \
            + ctx.bracket(u[1], ctx.bracket(u[2], u[0])) \
            + ctx.bracket(u[2], ctx.bracket(u[0], u[1]))
        assert not jac.is_zero()

    def test_jacobi_holds_for_passing_specs(self):
        for build in (two_dim_algebra, heisenberg, action_on_line):
            ctx = lie_poisson(build())
            c = ctx.chart
            gens = [c.var_poly(n) for n in c.names]
            for f, g, h in itertools.combinations(gens, 3):
                jac = ctx.bracket(f, ctx.bracket(g, h)) \
                    + ctx.bracket(g, ctx.bracket(h, f)) \
                    + ctx.bracket(h, ctx.bracket(f, g))
                assert jac.is_zero()

    def test_poisson_map_between_duals(self):
        # scaling e1 and fixing e2 is an endomorphism of [e1,e2] = e1,
        # so its dual map is Poisson; swapping the basis is not
        from algebroids.symplectic import PolyMap
        spec = two_dim_algebra()
        ctx = lie_poisson(spec)
        c = ctx.chart
        good = PolyMap(c, c, {"xi1*": 3 * c.var_poly("xi1*")})
        assert check_poisson_map(good, ctx, ctx).passed
        swap = PolyMap(c, c, {"xi1*": c.var_poly("xi2*"),
                              "xi2*": c.var_poly("xi1*")})
        rep = check_poisson_map(swap, ctx, ctx)
        assert not rep.passed


class TestKoszulAlgebroid:
    def test_constant_bivector(self):
        spec = koszul_constant()
        assert all(not p for (_, row) in spec.structure.items()
                   for p in row.values())
        assert spec.anchor_entry(0, 1) == pe("-1", PLANE)
        assert spec.anchor_entry(1, 0) == pe("1", PLANE)

    def test_zero_bivector(self):
        spec = koszul_algebroid(PLANE, {})
        assert all(p.is_zero() for row in spec.anchor for p in row)
        assert not spec.structure

    def test_linear_bivector_hamiltonian_pinned(self):
        mu = hamiltonian_of_algebroid(koszul_linear())
        assert mu.body == pe(
            "x1 * xi2 * x1* - x1 * xi1 * x2* + xi1 * xi2 * xi1*",
            mu.chart.chart)

    def test_not_poisson_rejected(self):
        base = Chart([("x1", 0), ("x2", 0), ("x3", 0)])
        with pytest.raises(NotPoisson):
            koszul_algebroid(base, {(0, 1): "x2", (1, 2): "x1"})


class TestConnections:
    def test_directional_derivative_is_flat(self):
        spec = abelian()
        conn = line_connection(spec, {})
        x = basis_section(spec, 0)
        y = basis_section(spec, 1)
        r = curvature(spec, conn, x, y)
        assert all(p.is_zero() for col in r.values() for p in col.values())

    def test_adjoint_connection_flat(self):
        spec = two_dim_algebra()
        conn = adjoint_line_connection(spec)
        gammas = [conn.gamma[a][0][0] for a in range(2)]
        assert gammas[0].is_zero()
        assert gammas[1] == POINT.const(-1)
        x, y = basis_section(spec, 0), basis_section(spec, 1)
        r = curvature(spec, conn, x, y)
        assert all(p.is_zero() for col in r.values() for p in col.values())

    def test_zero_connection_torsion(self):
        spec = two_dim_algebra()
        zero_conn = line_connection(spec, {})
        # connection on the bundle itself: zero coefficient matrices
        from algebroids.algebroid import Connection
        z = POINT.zero()
        conn = Connection(spec, spec.fiber_names,
                          tuple(tuple(tuple(z for _ in range(2))
                                      for _ in range(2)) for _ in range(2)))
        x, y = basis_section(spec, 0), basis_section(spec, 1)
        t = torsion(spec, conn, x, y)
        expected = {n: -p for n, p in section_bracket(spec, x, y).items()}
        assert t == expected


class TestBVOperator:
    def test_two_dim_top_power(self):
        spec = two_dim_algebra()
        conn = adjoint_line_connection(spec)
        mv = spec.multivector_chart()
        assert bv_operator(spec, conn, pe("xi1* * xi2*", mv)) == pe("xi1*", mv)

    def test_arity_zero_input(self):
        spec = two_dim_algebra()
        conn = adjoint_line_connection(spec)
        mv = spec.multivector_chart()
        assert bv_operator(spec, conn, mv.one()).is_zero()

    def test_flat_zero_connection_on_abelian(self):
        spec = abelian()
        conn = line_connection(spec, {})
        mv = spec.multivector_chart()
        assert bv_operator(spec, conn, pe("xi1*", mv)).is_zero()

    def test_divergence_on_tangent_line(self):
        spec = tangent_spec(LINE)
        conn = line_connection(spec, {})
        mv = spec.multivector_chart()
        assert bv_operator(spec, conn, pe("x * dx*", mv)) == mv.one()

    def _xu_identity(self, spec, conn, a, b):
        mv = spec.multivector_chart()
        pa, pb = mv.var_poly(a), mv.var_poly(b)

        def delta(p):
            return bv_operator(spec, conn, p)

        lhs = schouten_bracket(spec, pa, pb)
        rhs = -(delta(pa * pb) - delta(pa) * pb + pa * delta(pb))
        return lhs == rhs

    def test_generator_identity(self):
        for build in (two_dim_algebra, heisenberg):
            spec = build()
            conn = adjoint_line_connection(spec)
            for a in spec.fiber_names:
                for b in spec.fiber_names:
                    assert self._xu_identity(spec, conn,
                                             a + "*", b + "*")

    def test_square_zero_flat(self):
        rng = random.Random(43)
        for build in (two_dim_algebra, heisenberg):
            spec = build()
            conn = adjoint_line_connection(spec)
            mv = spec.multivector_chart()
            for _ in range(10):
                w = random_poly(mv, rng, 3, 0, 3)
                assert bv_operator(spec, conn,
                                   bv_operator(spec, conn, w)).is_zero()


class TestSectionBracket:
    def test_action_algebroid_sections(self):
        spec = action_on_line()
        x = {"xi1": LINE.var_poly("x")}
        y = {"xi2": LINE.one()}
        br = section_bracket(spec, x, y)
        # [x e1, e2] = x [e1,e2] - rho(e2)(x) e1 = x e1 - x e1 = 0
        assert all(p.is_zero() for p in br.values())

    def test_anchor_of(self):
        spec = action_on_line()
        assert anchor_of(spec, basis_section(spec, 1)) == \
            {"x": LINE.var_poly("x")}
