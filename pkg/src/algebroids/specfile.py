"""Line-oriented structured input files.

A document is a sequence of sections.  A section header sits at column zero
(`chart M`, `algebroid V`, `construct poisson P`); body lines are indented
`key value ...` entries, with expressions after an `=`.  Comments run from
`#` to end of line.  A single top-level `trunc <k>` line caps formal-series
weights for every chart in the file.  Unknown section kinds and unknown keys
are rejected with positions.

Expressions follow the core grammar; momentum names end in `*`, so products
must be written with spaced `*` operators (`xi1* * xi2*`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

from .algebroid import AlgebroidSpec, line_connection
from .bialgebroid import BialgebroidSpec, FullMorphism, LinftyHamiltonian
from .constructions import NijenhuisData
from .errors import DegreeError, ParseError, UndeclaredVariable
from .expr import parse_expression
from .gpoly import Chart, KIND_BASE
from .symplectic import PolyMap, shifted_cotangent

_SECTION_KINDS = ("chart", "algebroid", "bialgebroid", "hamiltonian",
                  "morphism", "connection", "bracket", "cediff", "schouten",
                  "bv", "lift", "legendre", "construct")

_CONSTRUCT_KINDS = ("tangent", "action", "poisson", "triangular", "nijenhuis",
                    "linfty-bialgebra")


@dataclass
class Section:
    kind: str
    name: str
    line: int
    entries: List[tuple]          # (key, args, expr_text, line)
    subtype: Optional[str] = None
    resolved: object = None

    def rows(self, key):
        return [e for e in self.entries if e[0] == key]

    def single(self, key, required=True):
        rows = self.rows(key)
        if len(rows) > 1:
            raise ParseError(f"duplicate key {key!r} in section {self.name!r}",
                             rows[1][3])
        if not rows:
            if required:
                raise ParseError(
                    f"section {self.name!r} is missing the {key!r} key",
                    self.line)
            return None
        return rows[0]


@dataclass
class SpecFile:
    trunc: Optional[int]
    sections: List[Section]
    registry: dict = field(default_factory=dict)

    def of_kind(self, kind, subtype=None):
        return [s for s in self.sections
                if s.kind == kind and (subtype is None or s.subtype == subtype)]

    def lookup(self, name, line=None):
        if name not in self.registry:
            raise ParseError(f"unknown section reference {name!r}", line)
        return self.registry[name]

    def __eq__(self, other):
        return isinstance(other, SpecFile) and serialize(self) == serialize(other)


def _tokenize_line(line: str):
    if "#" in line:
        line = line[:line.index("#")]
    if "=" in line:
        head, expr = line.split("=", 1)
        return head.split(), expr.strip()
    return line.split(), None


def _scan(text: str) -> List[Section]:
    sections = []
    trunc = None
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.rstrip()
        tokens, expr = _tokenize_line(stripped)
        if not tokens:
            continue
        indented = stripped[:1].isspace()
        if not indented:
            if tokens[0] == "trunc":
                if len(tokens) != 2 or expr is not None or not tokens[1].isdigit():
                    raise ParseError("trunc takes one non-negative integer",
                                     lineno)
                trunc = int(tokens[1])
                continue
            kind = tokens[0]
            if kind not in _SECTION_KINDS:
                raise ParseError(f"unknown section kind {kind!r}", lineno,
                                 expected=_SECTION_KINDS)
            if kind == "construct":
                if len(tokens) != 3:
                    raise ParseError("construct sections read "
                                     "'construct <kind> <name>'", lineno)
                subtype, name = tokens[1], tokens[2]
                if subtype not in _CONSTRUCT_KINDS:
                    raise ParseError(f"unknown construction {subtype!r}",
                                     lineno, expected=_CONSTRUCT_KINDS)
            else:
                if len(tokens) != 2:
                    raise ParseError(f"{kind} sections read '{kind} <name>'",
                                     lineno)
                subtype, name = None, tokens[1]
            current = Section(kind, name, lineno, [], subtype)
            sections.append(current)
            continue
        if current is None:
            raise ParseError("indented line outside any section", lineno)
        current.entries.append((tokens[0], tuple(tokens[1:]), expr, lineno))
    return sections, trunc


def _expr(text, chart, lineno):
    if text is None:
        raise ParseError("missing '=' expression", lineno)
    return parse_expression(text, chart, line=lineno)


_KEYS = {
    "chart": {"var"},
    "algebroid": {"base", "fiber", "anchor", "bracket"},
    "bialgebroid": {"primal", "dual"},
    "hamiltonian": {"algebroid", "value", "hbar-cap"},
    "morphism": {"type", "source", "target", "map", "base", "word", "cap"},
    "connection": {"algebroid", "gamma"},
    "bracket": {"algebroid", "left", "right"},
    "cediff": {"algebroid", "value"},
    "schouten": {"algebroid", "left", "right"},
    "bv": {"algebroid", "connection", "value"},
    "lift": {"chart", "shift", "component"},
    "legendre": {"algebroid"},
    "construct": {"base", "fiber", "anchor", "bracket", "act", "bivector",
                  "endo", "algebroid", "r", "component", "hbar-cap"},
}


def parse_spec(text: str, trunc_override: Optional[int] = None) -> SpecFile:
    sections, trunc = _scan(text)
    if trunc_override is not None:
        trunc = trunc_override
    doc = SpecFile(trunc, sections)
    for section in sections:
        if section.name in doc.registry:
            raise ParseError(f"duplicate section name {section.name!r}",
                             section.line)
        for key, args, expr, lineno in section.entries:
            if key not in _KEYS[section.kind]:
                raise ParseError(
                    f"unknown key {key!r} in {section.kind} section",
                    lineno, expected=sorted(_KEYS[section.kind]))
        _RESOLVERS[section.kind](doc, section)
        doc.registry[section.name] = section
    return doc


# -- per-section resolution ---------------------------------------------------


def _resolve_chart(doc, section):
    variables = []
    for key, args, expr, lineno in section.entries:
        if len(args) != 2 or expr is not None:
            raise ParseError("chart rows read 'var <name> <degree>'", lineno)
        name, degree = args
        try:
            degree = int(degree)
        except ValueError:
            raise ParseError(f"bad degree {degree!r}", lineno) from None
        variables.append((name, degree, KIND_BASE))
    section.resolved = Chart(variables, trunc=doc.trunc)


def _algebroid_section(doc, section) -> AlgebroidSpec:
    base_row = section.single("base")
    base = doc.lookup(base_row[1][0], base_row[3]).resolved
    if not isinstance(base, Chart):
        raise ParseError("the base must reference a chart section", base_row[3])
    fiber = []
    seen = set()
    for key, args, expr, lineno in section.rows("fiber"):
        if len(args) != 2:
            raise ParseError("fiber rows read 'fiber <name> <degree>'", lineno)
        fiber.append((args[0], int(args[1])))
        seen.add(args[0])
    if not fiber:
        raise ParseError(f"section {section.name!r} declares no fiber", section.line)
    index = {n: i for i, (n, _) in enumerate(fiber)}
    anchor = {}
    for key, args, expr, lineno in section.rows("anchor"):
        if len(args) != 2:
            raise ParseError("anchor rows read 'anchor <fiber> <base> = expr>'",
                             lineno)
        fn, xn = args
        if fn not in index:
            raise UndeclaredVariable(fn, lineno, 0)
        anchor[(fn, xn)] = _expr(expr, base, lineno)
    bracket = {}
    for key, args, expr, lineno in section.rows("bracket"):
        if len(args) != 3:
            raise ParseError(
                "bracket rows read 'bracket <a> <b> <c> = expr'", lineno)
        a, b, c = args
        for n in (a, b, c):
            if n not in index:
                raise UndeclaredVariable(n, lineno, 0)
        if index[a] >= index[b]:
            raise ParseError(
                f"bracket pair ({a},{b}) must be in canonical order "
                "(earlier fiber first)", lineno)
        bracket[(a, b, c)] = _expr(expr, base, lineno)
    return AlgebroidSpec(base, fiber, anchor, bracket)


def _resolve_algebroid(doc, section):
    section.resolved = _algebroid_section(doc, section)


def _resolve_bialgebroid(doc, section):
    primal_row = section.single("primal")
    dual_row = section.single("dual")
    primal = doc.lookup(primal_row[1][0], primal_row[3]).resolved
    dual = doc.lookup(dual_row[1][0], dual_row[3]).resolved
    if not isinstance(primal, AlgebroidSpec) or not isinstance(dual, AlgebroidSpec):
        raise ParseError("bialgebroid sections reference algebroid sections",
                         section.line)
    section.resolved = BialgebroidSpec(primal, dual)


def _resolve_hamiltonian(doc, section):
    alg_row = section.single("algebroid")
    spec = doc.lookup(alg_row[1][0], alg_row[3]).resolved
    if not isinstance(spec, AlgebroidSpec):
        raise ParseError("hamiltonian sections reference an algebroid",
                         alg_row[3])
    cap_row = section.single("hbar-cap", required=False)
    cap = int(cap_row[1][0]) if cap_row else 4
    value_row = section.single("value")
    sc = spec.symplectic_chart()
    body = _expr(value_row[2], sc.chart, value_row[3])
    section.resolved = LinftyHamiltonian(sc, body, cap)


def _resolve_morphism(doc, section):
    type_row = section.single("type")
    mtype = type_row[1][0]
    if mtype not in ("semistrict", "full"):
        raise ParseError("morphism type is 'semistrict' or 'full'", type_row[3])
    source = doc.lookup(section.single("source")[1][0], section.line).resolved
    target = doc.lookup(section.single("target")[1][0], section.line).resolved
    for endpoint in (source, target):
        if not isinstance(endpoint, (AlgebroidSpec, LinftyHamiltonian)):
            raise ParseError("morphism endpoints reference algebroid or "
                             "hamiltonian sections", section.line)

    def ce_chart_of(obj):
        if isinstance(obj, AlgebroidSpec):
            return obj.ce_chart()
        return Chart([(v.name, v.degree, v.kind)
                      for v in obj.chart.base_chart.vars],
                     trunc=obj.chart.base_chart.trunc)

    src_ce, tgt_ce = ce_chart_of(source), ce_chart_of(target)
    if mtype == "semistrict":
        assignment = {}
        for key, args, expr, lineno in section.rows("map"):
            if len(args) != 1:
                raise ParseError("map rows read 'map <targetvar> = expr'",
                                 lineno)
            assignment[args[0]] = _expr(expr, src_ce, lineno)
        resolved = PolyMap(src_ce, tgt_ce, assignment)
    else:
        cap_row = section.single("cap")
        cap = int(cap_row[1][0])
        base_map = {}
        for key, args, expr, lineno in section.rows("base"):
            base_map[args[0]] = _expr(expr, src_ce, lineno)
        words = {}
        for key, args, expr, lineno in section.rows("word"):
            exps = [0] * len(tgt_ce.vars)
            for n in args:
                exps[tgt_ce.index_of(n)] += 1
            words[tuple(exps)] = _expr(expr, src_ce, lineno)
        resolved = FullMorphism(src_ce, tgt_ce, base_map, words, cap)
    section.resolved = (mtype, source, target, resolved)


def _resolve_connection(doc, section):
    spec = doc.lookup(section.single("algebroid")[1][0], section.line).resolved
    gammas = {}
    for key, args, expr, lineno in section.rows("gamma"):
        gammas[args[0]] = _expr(expr, spec.base, lineno)
    section.resolved = (spec, line_connection(spec, gammas))


def _resolve_bracket(doc, section):
    spec = doc.lookup(section.single("algebroid")[1][0], section.line).resolved
    sc = spec.symplectic_chart()
    left = _expr(section.single("left")[2], sc.chart, section.single("left")[3])
    right = _expr(section.single("right")[2], sc.chart,
                  section.single("right")[3])
    section.resolved = (spec, left, right)


def _resolve_cediff(doc, section):
    spec = doc.lookup(section.single("algebroid")[1][0], section.line).resolved
    row = section.single("value")
    section.resolved = (spec, _expr(row[2], spec.ce_chart(), row[3]))


def _resolve_schouten(doc, section):
    spec = doc.lookup(section.single("algebroid")[1][0], section.line).resolved
    mv = spec.multivector_chart()
    left = _expr(section.single("left")[2], mv, section.single("left")[3])
    right = _expr(section.single("right")[2], mv, section.single("right")[3])
    section.resolved = (spec, left, right)


def _resolve_bv(doc, section):
    spec = doc.lookup(section.single("algebroid")[1][0], section.line).resolved
    conn_spec, conn = doc.lookup(section.single("connection")[1][0],
                                 section.line).resolved
    if conn_spec is not spec:
        raise ParseError("the connection must belong to the same algebroid",
                         section.line)
    row = section.single("value")
    section.resolved = (spec, conn,
                        _expr(row[2], spec.multivector_chart(), row[3]))


def _resolve_lift(doc, section):
    chart = doc.lookup(section.single("chart")[1][0], section.line).resolved
    if not isinstance(chart, Chart):
        raise ParseError("lift sections reference a chart", section.line)
    shift_row = section.single("shift", required=False)
    shift = int(shift_row[1][0]) if shift_row else 2
    comps = {}
    for key, args, expr, lineno in section.rows("component"):
        comps[args[0]] = _expr(expr, chart, lineno)
    section.resolved = (chart, shift, comps)


def _resolve_legendre(doc, section):
    spec = doc.lookup(section.single("algebroid")[1][0], section.line).resolved
    section.resolved = spec


def _resolve_construct(doc, section):
    kind = section.subtype
    if kind == "tangent":
        base = doc.lookup(section.single("base")[1][0], section.line).resolved
        section.resolved = ("tangent", (base,))
    elif kind == "action":
        base = doc.lookup(section.single("base")[1][0], section.line).resolved
        fiber = [(args[0], int(args[1]))
                 for _, args, _, _ in section.rows("fiber")]
        brackets = {}
        for key, args, expr, lineno in section.rows("bracket"):
            p = _expr(expr, base, lineno)
            if any(any(m) for m in p.terms):
                raise DegreeError(
                    "action structure coefficients must be constants")
            brackets[(args[0], args[1], args[2])] = p
        action = {}
        for key, args, expr, lineno in section.rows("act"):
            action[(args[0], args[1])] = _expr(expr, base, lineno)
        section.resolved = ("action", (base, fiber, brackets, action))
    elif kind == "poisson":
        base = doc.lookup(section.single("base")[1][0], section.line).resolved
        pi = {}
        for key, args, expr, lineno in section.rows("bivector"):
            pi[(args[0], args[1])] = _expr(expr, base, lineno)
        cap_row = section.single("hbar-cap", required=False)
        section.resolved = ("poisson", (base, pi,
                                        int(cap_row[1][0]) if cap_row else 4))
    elif kind == "triangular":
        spec = doc.lookup(section.single("algebroid")[1][0],
                          section.line).resolved
        row = section.single("r")
        r = _expr(row[2], spec.multivector_chart(), row[3])
        section.resolved = ("triangular", (spec, r))
    elif kind == "nijenhuis":
        base = doc.lookup(section.single("base")[1][0], section.line).resolved
        endo = {}
        for key, args, expr, lineno in section.rows("endo"):
            endo[(args[0], args[1])] = _expr(expr, base, lineno)
        pi = {}
        for key, args, expr, lineno in section.rows("bivector"):
            pi[(args[0], args[1])] = _expr(expr, base, lineno)
        section.resolved = ("nijenhuis", (NijenhuisData(base, endo, pi),))
    elif kind == "linfty-bialgebra":
        fiber = [(args[0], int(args[1]))
                 for _, args, _, _ in section.rows("fiber")]
        coords = Chart([(n, 1 - d, "fiber") for n, d in fiber],
                       trunc=doc.trunc)
        sc = shifted_cotangent(coords, 2)
        components = {}
        for key, args, expr, lineno in section.rows("component"):
            m, n = int(args[0]), int(args[1])
            components[(m, n)] = _expr(expr, sc.chart, lineno)
        cap_row = section.single("hbar-cap", required=False)
        section.resolved = ("linfty-bialgebra",
                            (fiber, components,
                             int(cap_row[1][0]) if cap_row else 4))


_RESOLVERS = {
    "chart": _resolve_chart,
    "algebroid": _resolve_algebroid,
    "bialgebroid": _resolve_bialgebroid,
    "hamiltonian": _resolve_hamiltonian,
    "morphism": _resolve_morphism,
    "connection": _resolve_connection,
    "bracket": _resolve_bracket,
    "cediff": _resolve_cediff,
    "schouten": _resolve_schouten,
    "bv": _resolve_bv,
    "lift": _resolve_lift,
    "legendre": _resolve_legendre,
    "construct": _resolve_construct,
}


# -- serialization -------------------------------------------------------------


def serialize(doc: SpecFile) -> str:
    lines = []
    if doc.trunc is not None:
        lines.append(f"trunc {doc.trunc}")
        lines.append("")
    for section in doc.sections:
        header = (f"construct {section.subtype} {section.name}"
                  if section.kind == "construct"
                  else f"{section.kind} {section.name}")
        lines.append(header)
        for key, args, expr, _ in section.entries:
            row = "  " + " ".join((key,) + tuple(args))
            if expr is not None:
                row += f" = {expr.strip()}"
            lines.append(row)
        lines.append("")
    return "\n".join(lines).rstrip() + "\n"
