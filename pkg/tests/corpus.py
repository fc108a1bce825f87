"""Shared example structures used across the test modules.

The corpus deliberately mixes points and polynomial bases, constant and
x-dependent anchors, and includes deliberately broken variants for the
route-equivalence checks.
"""

from algebroids.algebroid import AlgebroidSpec, koszul_algebroid, tangent_spec
from algebroids.bialgebroid import BialgebroidSpec
from algebroids.gpoly import Chart

POINT = Chart([])
LINE = Chart([("x", 0)])
PLANE = Chart([("x1", 0), ("x2", 0)])


def two_dim_algebra():
    # [e1, e2] = e1
    return AlgebroidSpec(POINT, [("xi1", 0), ("xi2", 0)], {},
                         {("xi1", "xi2", "xi1"): 1})


def heisenberg():
    # [e1, e2] = e3
    return AlgebroidSpec(POINT, [("xi1", 0), ("xi2", 0), ("xi3", 0)], {},
                         {("xi1", "xi2", "xi3"): 1})


def heisenberg_plus_line():
    # [e1, e2] = e3, e4 central
    return AlgebroidSpec(POINT,
                         [("xi1", 0), ("xi2", 0), ("xi3", 0), ("xi4", 0)], {},
                         {("xi1", "xi2", "xi3"): 1})


def rotations():
    # [e1, e2] = e3, [e2, e3] = e1, [e3, e1] = e2
    return AlgebroidSpec(POINT, [("xi1", 0), ("xi2", 0), ("xi3", 0)], {},
                         {("xi1", "xi2", "xi3"): 1,
                          ("xi2", "xi3", "xi1"): 1,
                          ("xi1", "xi3", "xi2"): -1})


def abelian(rank=2):
    return AlgebroidSpec(POINT, [(f"xi{i + 1}", 0) for i in range(rank)], {}, {})


def action_on_line():
    # e1 -> d/dx, e2 -> x d/dx realizes [e1, e2] = e1
    return AlgebroidSpec(LINE, [("xi1", 0), ("xi2", 0)],
                         {("xi1", "x"): 1, ("xi2", "x"): "x"},
                         {("xi1", "xi2", "xi1"): 1})


def zero_anchor_family():
    # a family of Lie algebras over the line: constant Heisenberg brackets
    return AlgebroidSpec(LINE, [("xi1", 0), ("xi2", 0), ("xi3", 0)], {},
                         {("xi1", "xi2", "xi3"): 1})


def rank_one_polynomial_anchor():
    # rank one, rho(e) = x d/dx
    return AlgebroidSpec(LINE, [("xi1", 0)], {("xi1", "x"): "x"}, {})


def koszul_linear():
    return koszul_algebroid(PLANE, {(0, 1): "x1"})


def koszul_constant():
    return koszul_algebroid(PLANE, {(0, 1): 1})


def broken_constants():
    # Jacobiator residual e2 on (e1, e2, e3)
    return AlgebroidSpec(POINT, [("xi1", 0), ("xi2", 0), ("xi3", 0)], {},
                         {("xi1", "xi2", "xi1"): 1, ("xi1", "xi3", "xi2"): 1})


def swapped_action():
    return AlgebroidSpec(LINE, [("xi1", 0), ("xi2", 0)],
                         {("xi1", "x"): "x", ("xi2", "x"): 1},
                         {("xi1", "xi2", "xi1"): 1})


def broken_three_dim():
    # [e1, e2] = e3, [e2, e3] = e2 violates Jacobi
    return AlgebroidSpec(POINT, [("xi1", 0), ("xi2", 0), ("xi3", 0)], {},
                         {("xi1", "xi2", "xi3"): 1, ("xi2", "xi3", "xi2"): 1})


def abelian_bad_anchor():
    # zero brackets but a non-commuting anchor image
    return AlgebroidSpec(LINE, [("xi1", 0), ("xi2", 0)],
                         {("xi1", "x"): 1, ("xi2", "x"): "x"}, {})


def koszul_perturbed():
    # flip one derivative entry of the x1-linear cotangent structure
    return AlgebroidSpec(PLANE, [("xi1", 0), ("xi2", 0)],
                         {("xi2", "x1"): "x1", ("xi1", "x2"): "-x1"},
                         {("xi1", "xi2", "xi1"): 1})


PASSING = {
    "tangent-line": lambda: tangent_spec(LINE),
    "tangent-plane": lambda: tangent_spec(PLANE),
    "two-dim": two_dim_algebra,
    "heisenberg": heisenberg,
    "heisenberg-plus-line": heisenberg_plus_line,
    "rotations": rotations,
    "abelian": abelian,
    "action-on-line": action_on_line,
    "zero-anchor-family": zero_anchor_family,
    "rank-one-polynomial-anchor": rank_one_polynomial_anchor,
    "koszul-linear": koszul_linear,
    "koszul-constant": koszul_constant,
}

FAILING = {
    "broken-constants": broken_constants,
    "swapped-action": swapped_action,
    "broken-three-dim": broken_three_dim,
    "abelian-bad-anchor": abelian_bad_anchor,
    "koszul-perturbed": koszul_perturbed,
}


def dual_tangent_type(primal):
    """The dual-side spec with identity anchor and zero brackets."""
    names = primal.starred_names()
    anchor = {(fn, xv.name): 1 for fn, xv in zip(names, primal.base.vars)}
    return AlgebroidSpec(primal.base, [(fn, 0) for fn in names], anchor, {})


def dual_abelian(primal):
    return AlgebroidSpec(primal.base,
                         [(fn, 0) for fn in primal.starred_names()], {}, {})


def poisson_pair(pi_entries, base=PLANE):
    primal = koszul_algebroid(base, pi_entries)
    return BialgebroidSpec(primal, dual_tangent_type(primal))


def two_dim_with_abelian_dual():
    primal = two_dim_algebra()
    return BialgebroidSpec(primal, dual_abelian(primal))


def two_dim_triangular_pair():
    """The dual bracket induced by r = e1 ^ e2 on the two-dim algebra."""
    primal = two_dim_algebra()
    dual = AlgebroidSpec(POINT, [("xi1*", 0), ("xi2*", 0)], {},
                         {("xi1*", "xi2*", "xi2*"): 1})
    return BialgebroidSpec(primal, dual)


def two_dim_mirror_pair():
    """The other cobracket on the two-dim algebra; on this algebra every
    linear map into the top wedge is a cocycle, so the pair is compatible."""
    primal = two_dim_algebra()
    dual = AlgebroidSpec(POINT, [("xi1*", 0), ("xi2*", 0)], {},
                         {("xi1*", "xi2*", "xi1*"): 1})
    return BialgebroidSpec(primal, dual)


def heisenberg_self_dual_pair():
    """Cobracket dual to the Heisenberg bracket itself: delta(e3) = e1 ^ e2
    is not a cocycle, so the compatibility fails."""
    primal = heisenberg()
    dual = AlgebroidSpec(POINT, [("xi1*", 0), ("xi2*", 0), ("xi3*", 0)], {},
                         {("xi1*", "xi2*", "xi3*"): 1})
    return BialgebroidSpec(primal, dual)


BIALGEBROID_PASSING = {
    "poisson-linear": lambda: poisson_pair({(0, 1): "x1"}),
    "poisson-zero": lambda: poisson_pair({}),
    "poisson-constant": lambda: poisson_pair({(0, 1): 1}),
    "two-dim-abelian-dual": two_dim_with_abelian_dual,
    "two-dim-triangular": two_dim_triangular_pair,
    "two-dim-mirror": two_dim_mirror_pair,
}

BIALGEBROID_FAILING = {
    "heisenberg-bad-cobracket": heisenberg_self_dual_pair,
}
