"""Command-line interface: parse a spec file, run checks, report verdicts.

Exit codes: 0 all checks pass, 1 verification failure, 2 parse/validation
error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from typing import List, Optional

from .algebroid import (AlgebroidSpec, bv_operator, ce_differential,
                        check_algebroid, hamiltonian_of_algebroid,
                        schouten_bracket)
from .bialgebroid import (LinftyHamiltonian, check_bialgebroid, check_linfty,
                          legendre_quadratic_check, linfty_morphism_check,
                          semistrict_morphism_check)
from .constructions import (action_algebroid, linfty_bialgebra,
                            nijenhuis_check, poisson_bialgebroid,
                            tangent_algebroid, triangular)
from .errors import AlgebroidsError, MissingSection, ParseError, UndeclaredVariable
from .gpoly import random_poly, render_poly
from .report import Report
from .specfile import SpecFile, parse_spec, serialize
from .symplectic import (Hamiltonian, canonical_bracket, hamiltonian_lift,
                         legendre, shifted_cotangent, twin_chart)

SUBCOMMANDS = ("check-algebroid", "check-coalgebroid", "check-bialgebroid",
               "check-linfty", "check-morphism", "bracket", "ce-diff",
               "schouten", "bv", "lift", "legendre", "construct",
               "round-trip")


def _filter(sections, name):
    if name is None:
        return sections
    return [s for s in sections if s.name == name]


def _value_report(title, value) -> Report:
    report = Report(title)
    report.add("value", "evaluation", passed=True, detail=render_poly(value))
    return report


def _require(sections, kind):
    if not sections:
        raise MissingSection(f"no {kind} sections in the file")
    return sections


def run(subcommand: str, doc: SpecFile, name: Optional[str] = None,
        seed: int = 0) -> List[tuple]:
    """Execute a subcommand; returns [(section name, Report), ...]."""
    out = []
    if subcommand == "check-algebroid":
        for s in _require(_filter(doc.of_kind("algebroid"), name), "algebroid"):
            out.append((s.name, check_algebroid(s.resolved)))
    elif subcommand == "check-coalgebroid":
        # dual-structure data presented as an algebroid on the dual bundle
        for s in _require(_filter(doc.of_kind("algebroid"), name), "algebroid"):
            rep = check_algebroid(s.resolved)
            rep.title = "coalgebroid (dual algebroid data)"
            out.append((s.name, rep))
    elif subcommand == "check-bialgebroid":
        for s in _require(_filter(doc.of_kind("bialgebroid"), name),
                          "bialgebroid"):
            rep = check_bialgebroid(s.resolved)
            rep.extend(legendre_quadratic_check(s.resolved))
            out.append((s.name, rep))
    elif subcommand == "check-linfty":
        found = []
        for s in _filter(doc.of_kind("hamiltonian"), name):
            found.append((s.name, s.resolved))
        for s in _filter(doc.of_kind("construct"), name):
            built = _build_construct(s)
            if isinstance(built, LinftyHamiltonian):
                found.append((s.name, built))
        if not found:
            raise MissingSection("no hamiltonian-bearing sections in the file")
        for nm, lham in found:
            out.append((nm, check_linfty(lham)))
    elif subcommand == "check-morphism":
        for s in _require(_filter(doc.of_kind("morphism"), name), "morphism"):
            mtype, source, target, data = s.resolved
            ham_src = _hamiltonian_of(source)
            ham_tgt = _hamiltonian_of(target)
            if mtype == "semistrict":
                rep = semistrict_morphism_check(data, ham_src, ham_tgt)
            else:
                rep = linfty_morphism_check(data, _linfty_of(source),
                                            _linfty_of(target))
            out.append((s.name, rep))
    elif subcommand == "bracket":
        for s in _require(_filter(doc.of_kind("bracket"), name), "bracket"):
            spec, left, right = s.resolved
            value = canonical_bracket(left, right, spec.symplectic_chart())
            out.append((s.name, _value_report("bracket", value)))
    elif subcommand == "ce-diff":
        for s in _require(_filter(doc.of_kind("cediff"), name), "cediff"):
            spec, value = s.resolved
            out.append((s.name, _value_report("ce-differential",
                                              ce_differential(spec, value))))
    elif subcommand == "schouten":
        for s in _require(_filter(doc.of_kind("schouten"), name), "schouten"):
            spec, left, right = s.resolved
            out.append((s.name, _value_report(
                "schouten", schouten_bracket(spec, left, right))))
    elif subcommand == "bv":
        for s in _require(_filter(doc.of_kind("bv"), name), "bv"):
            spec, conn, value = s.resolved
            out.append((s.name, _value_report(
                "bv-operator", bv_operator(spec, conn, value))))
    elif subcommand == "lift":
        for s in _require(_filter(doc.of_kind("lift"), name), "lift"):
            chart, shift, comps = s.resolved
            sc = shifted_cotangent(chart, shift)
            out.append((s.name, _value_report(
                "hamiltonian-lift", hamiltonian_lift(sc, comps))))
    elif subcommand == "legendre":
        for s in _require(_filter(doc.of_kind("legendre"), name), "legendre"):
            out.append((s.name, _legendre_report(s.resolved, seed)))
    elif subcommand == "construct":
        sections = doc.of_kind("construct", subtype=name) if name else \
            doc.of_kind("construct")
        for s in _require(sections, "construct"):
            out.append((s.name, _construct_report(s)))
    elif subcommand == "round-trip":
        report = Report("round-trip")
        report.add("serialize-parse", "parse, serialize, parse is the identity",
                   passed=(parse_spec(serialize(doc)) == doc))
        out.append(("file", report))
    else:
        raise AlgebroidsError(f"unknown subcommand {subcommand!r}")
    return out


def _hamiltonian_of(obj) -> Hamiltonian:
    if isinstance(obj, AlgebroidSpec):
        return hamiltonian_of_algebroid(obj)
    return Hamiltonian(obj.chart, obj.body)


def _linfty_of(obj) -> LinftyHamiltonian:
    if isinstance(obj, AlgebroidSpec):
        mu = hamiltonian_of_algebroid(obj)
        return LinftyHamiltonian(mu.chart, mu.body)
    return obj


def _legendre_report(spec: AlgebroidSpec, seed: int) -> Report:
    report = Report("legendre")
    sc = spec.symplectic_chart()
    lmap = legendre(sc)
    for v in lmap.target.vars:
        report.add(f"assign({v.name})", "coordinate image", passed=True,
                   detail=render_poly(lmap.image_of(v.name)))
    back = legendre(twin_chart(sc))
    report.add("involution", "the exchange composed with itself is the identity",
               passed=lmap.then(back).is_identity())
    rng = random.Random(seed)
    ok = True
    for _ in range(10):
        f = random_poly(lmap.target, rng, max_weight=4, max_base_degree=1,
                        max_terms=2)
        g = random_poly(lmap.target, rng, max_weight=4, max_base_degree=1,
                        max_terms=2)
        lhs = lmap.pullback(canonical_bracket(f, g, twin_chart(sc)))
        rhs = canonical_bracket(lmap.pullback(f), lmap.pullback(g), sc)
        ok = ok and (lhs == rhs)
    report.add("bracket-preserving",
               "pullback respects the canonical bracket on sampled pairs",
               passed=ok, detail=f"seed={seed}")
    return report


def _build_construct(section):
    kind, args = section.resolved
    if kind == "tangent":
        return tangent_algebroid(*args)
    if kind == "action":
        return action_algebroid(*args)
    if kind == "poisson":
        return poisson_bialgebroid(*args)[1]
    if kind == "triangular":
        return triangular(*args)
    if kind == "nijenhuis":
        return args[0]
    if kind == "linfty-bialgebra":
        return linfty_bialgebra(*args)
    raise AlgebroidsError(f"unknown construction {kind!r}")


def _construct_report(section) -> Report:
    kind, args = section.resolved
    if kind in ("tangent", "action"):
        rep = check_algebroid(_build_construct(section))
        rep.title = f"construct {kind}"
        return rep
    if kind == "poisson":
        b, chi = poisson_bialgebroid(*args)
        rep = check_bialgebroid(b)
        rep.extend(check_linfty(chi))
        rep.title = "construct poisson"
        return rep
    if kind == "triangular":
        rep = Report("construct triangular")
        lham = triangular(*args)
        rep.add("self-check",
                "lifted [r,-] matches the bracket route (checked on build)",
                passed=True)
        rep.extend(check_linfty(lham))
        weights = lham.body.kind_weights(
            ("momentum-base", "momentum-fiber"))
        rep.add("weight-profile",
                "momentum weights stay within the linear-quadratic window",
                passed=weights <= {1, 2},
                detail=f"weights={sorted(weights)}")
        return rep
    if kind == "nijenhuis":
        return nijenhuis_check(args[0])
    if kind == "linfty-bialgebra":
        rep = check_linfty(linfty_bialgebra(*args))
        rep.title = "construct linfty-bialgebra"
        return rep
    raise AlgebroidsError(f"unknown construction {kind!r}")


# -- entry point ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="algebroids",
        description="Exact verification of graded bracket structures "
                    "declared in spec files.")
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("file", help="input spec file")
    parser.add_argument("--name", help="restrict to one section "
                                       "(or one construction kind for 'construct')")
    parser.add_argument("--json", action="store_true", dest="as_json",
                        help="machine-readable output")
    parser.add_argument("--residuals", action="store_true",
                        help="print full residual polynomials")
    parser.add_argument("--trunc", type=int, default=None,
                        help="override the file's weight cap")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for randomized property subcommands")
    parser.add_argument("--timings", action="store_true",
                        help="show elapsed time in the human summary")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.file, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        doc = parse_spec(text, trunc_override=args.trunc)
        started = time.perf_counter()
        results = run(args.subcommand, doc, name=args.name, seed=args.seed)
        elapsed = (time.perf_counter() - started) * 1000.0
    except (ParseError, UndeclaredVariable, MissingSection) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AlgebroidsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:   # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 3

    passed = all(rep.passed for _, rep in results)
    if args.as_json:
        payload = {
            "command": args.subcommand,
            "sections": [
                {"name": name, **rep.to_dict(residuals=args.residuals)}
                for name, rep in results
            ],
            "passed": passed,
        }
        print(json.dumps(payload, indent=2))
    else:
        for name, rep in results:
            if args.timings:
                rep.elapsed_ms = elapsed
            print(f"[{name}]")
            print(rep.render(residuals=args.residuals, timings=args.timings))
        print(f"result: {'PASS' if passed else 'FAIL'}")
    return 0 if passed else 1


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
