"""Text format for presentations, submersions, cochains, and foliations.

Grammar (EBNF; '#' starts a line comment, whitespace is free):

    file       := item*
    item       := algebroid | submersion | cochain | foliation
    algebroid  := "algebroid" NAME "{" base fiber anchor bracket "}"
    base       := "base" "{" [decl ("," decl)*] "}"
    fiber      := "fiber" "{" [decl ("," decl)*] "}"
    decl       := NAME ":" INT
    anchor     := "anchor" "{" (NAME "->" vpoly ";")* "}"
    bracket    := "bracket" "{" ("[" NAME "," NAME "]" "=" spoly ";")* "}"
    submersion := "submersion" NAME "{" "over" NAME ";" fiber "}"
    cochain    := "cochain" NAME "on" NAME "{" "arity" INT ";" values symbol "}"
    values     := "values" "{" ("[" [namelist] "]" "=" spoly ";")* "}"
    symbol     := "symbol" "{" ("[" [namelist] "]" "=" vpoly ";")* "}"
    foliation  := "foliation" NAME "{" ambient spanning "}"
    ambient    := "ambient" "{" [decl ("," decl)*] "}"
    spanning   := "spanning" "{" (vpoly ";")* "}"

Polynomials use integer or rational literals (p/q), "*" products, "^" powers
and parentheses; "d/d<coord>" atoms make a vector field (vpoly), frame names
make a section expression (spoly).  Omitted anchor or bracket rows default to
zero.  `emit` produces the canonical form (declaration order kept, graded-lex
monomial order, rationals as p/q, zero entries omitted) and `parse . emit` is
the identity on it.

The parser never raises on arbitrary input: every rejection is a Diagnostic
with a source span.  Weight-inhomogeneity is not a parse error; it surfaces
when a presentation is validated, with the span of the offending entry.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .algebroid import AlgebroidPresentation, presentation_generators
from .deformation import Multiderivation
from .foliation import FoliationSpec
from .graded import GradedElement, format_element
from .pullback import SubmersionSpec

MAX_NESTING = 64


@dataclass(frozen=True)
class Span:
    line: int
    column: int
    length: int


@dataclass
class Diagnostic:
    severity: str            # "error" or "warning"
    span: Span
    message: str
    code: str

    def render(self) -> str:
        return (f"{self.severity}[{self.code}] line {self.span.line}, "
                f"col {self.span.column}: {self.message}")


@dataclass
class SpecDocument:
    algebroids: dict[str, AlgebroidPresentation] = field(default_factory=dict)
    submersions: dict[str, SubmersionSpec] = field(default_factory=dict)
    cochains: dict[str, Multiderivation] = field(default_factory=dict)
    foliations: dict[str, FoliationSpec] = field(default_factory=dict)
    order: list[tuple[str, str]] = field(default_factory=list)
    submersion_over: dict[str, str] = field(default_factory=dict)
    cochain_on: dict[str, str] = field(default_factory=dict)
    spans: dict[tuple, Span] = field(default_factory=dict)

    def span_of(self, *key) -> Span:
        return self.spans.get(tuple(key), Span(1, 1, 1))


@dataclass
class ParseResult:
    document: SpecDocument | None
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.document is not None


# -- lexer ---------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<comment>#[^\n]*)"
    r"|(?P<ddx>d/d[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<int>[0-9]+)"
    r"|(?P<arrow>->)"
    r"|(?P<punct>[{}\[\](),;:=+\-*^/])"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: Span


def _lex(text: str) -> tuple[list[Token], list[Diagnostic]]:
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    line, col = 1, 1
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            ch = text[pos]
            diags.append(Diagnostic("error", Span(line, col, 1),
                                    f"unexpected character {ch!r}", "E001"))
            pos += 1
            col += 1
            continue
        kind = m.lastgroup
        raw = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind if kind != "punct" else raw,
                                raw, Span(line, col, len(raw))))
        newlines = raw.count("\n")
        if newlines:
            line += newlines
            col = len(raw) - raw.rfind("\n")
        else:
            col += len(raw)
        pos = m.end()
    tokens.append(Token("eof", "", Span(line, col, 0)))
    return tokens, diags


# -- parser --------------------------------------------------------------------

class _ParseError(Exception):
    def __init__(self, diag: Diagnostic):
        self.diag = diag


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, message: str, span: Span | None = None, code: str = "E002"):
        raise _ParseError(Diagnostic("error", span or self.peek().span, message, code))

    def expect(self, kind: str, what: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            self.error(f"expected {what or kind!r}, found {tok.text or 'end of input'!r}")
        return self.next()

    def expect_keyword(self, word: str) -> Token:
        tok = self.peek()
        if tok.kind != "name" or tok.text != word:
            self.error(f"expected {word!r}, found {tok.text or 'end of input'!r}")
        return self.next()

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "name" and tok.text == word

    # expressions: a commutative polynomial over named atoms
    def parse_expression(self) -> tuple[dict, Span, dict]:
        start = self.peek().span
        symspans: dict[str, Span] = {}
        poly = self._expr(symspans, 0)
        return poly, start, symspans

    def _expr(self, symspans, depth) -> dict:
        if depth > MAX_NESTING:
            self.error("expression is nested too deeply", code="E003")
        sign = 1
        if self.peek().kind in ("+", "-"):
            if self.next().kind == "-":
                sign = -1
        poly = _poly_scale(self._term(symspans, depth), sign)
        while self.peek().kind in ("+", "-"):
            op = self.next().kind
            term = self._term(symspans, depth)
            poly = _poly_add(poly, _poly_scale(term, -1 if op == "-" else 1))
        return poly

    def _term(self, symspans, depth) -> dict:
        poly = self._factor(symspans, depth)
        while self.peek().kind == "*":
            self.next()
            poly = _poly_mul(poly, self._factor(symspans, depth))
        return poly

    def _factor(self, symspans, depth) -> dict:
        tok = self.peek()
        if tok.kind == "(":
            self.next()
            inner = self._expr(symspans, depth + 1)
            self.expect(")")
            return inner
        if tok.kind == "-":
            self.next()
            return _poly_scale(self._factor(symspans, depth), -1)
        if tok.kind == "int":
            self.next()
            value = Fraction(int(tok.text))
            if self.peek().kind == "/":
                self.next()
                den = self.expect("int", "a denominator")
                if int(den.text) == 0:
                    self.error("zero denominator", den.span, code="E004")
                value = value / int(den.text)
            return _poly_const(value)
        if tok.kind in ("name", "ddx"):
            self.next()
            symspans.setdefault(tok.text, tok.span)
            exp = 1
            if self.peek().kind == "^":
                self.next()
                e = self.expect("int", "an exponent")
                exp = int(e.text)
            return {((tok.text, exp),): Fraction(1)} if exp else _poly_const(Fraction(1))
        self.error(f"expected a polynomial factor, found {tok.text or 'end of input'!r}")

    def parse_decl_block(self, keyword: str) -> list[tuple[str, int, Span]]:
        self.expect_keyword(keyword)
        self.expect("{")
        decls: list[tuple[str, int, Span]] = []
        if self.peek().kind != "}":
            while True:
                name = self.expect("name", "a generator name")
                self.expect(":")
                neg = False
                if self.peek().kind == "-":
                    self.next()
                    neg = True
                num = self.expect("int", "a weight")
                decls.append((name.text, -int(num.text) if neg else int(num.text), name.span))
                if self.peek().kind != ",":
                    break
                self.next()
        self.expect("}")
        return decls

    def parse_namelist(self) -> list[Token]:
        self.expect("[")
        names: list[Token] = []
        if self.peek().kind != "]":
            while True:
                names.append(self.expect("name", "a section name"))
                if self.peek().kind != ",":
                    break
                self.next()
        self.expect("]")
        return names


# generic polynomials: {((symbol, exp), ...) sorted: Fraction}

def _poly_const(c: Fraction) -> dict:
    return {(): c} if c else {}


def _poly_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        s = out.get(k, 0) + v
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def _poly_scale(a: dict, c) -> dict:
    if not c:
        return {}
    return {k: v * c for k, v in a.items()}


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            exps: dict[str, int] = {}
            for s, e in ka + kb:
                exps[s] = exps.get(s, 0) + e
            key = tuple(sorted(exps.items()))
            s = out.get(key, 0) + va * vb
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return out


# -- elaboration ---------------------------------------------------------------

_DDX = re.compile(r"^d/d(.+)$")


def _split_special(poly: dict, specials: set[str], what: str, span: Span):
    """Split sum(poly * special) by the special symbol; reject nonlinear use.

    Returns {special_name: coefficient poly}; plain terms (no special symbol)
    are rejected unless the whole polynomial is zero.
    """
    out: dict[str, dict] = {}
    for key, coeff in poly.items():
        hits = [(s, e) for s, e in key if s in specials]
        if not hits:
            raise _ParseError(Diagnostic(
                "error", span, f"every term must contain exactly one {what}", "E010"))
        if len(hits) > 1 or hits[0][1] != 1:
            raise _ParseError(Diagnostic(
                "error", span, f"{what} factors must appear linearly", "E011"))
        name = hits[0][0]
        rest = tuple((s, e) for s, e in key if s not in specials)
        slot = out.setdefault(name, {})
        slot[rest] = slot.get(rest, 0) + coeff
    return out


def _poly_to_element(poly: dict, gens, symspans, span: Span) -> GradedElement:
    """A generic polynomial in even coordinates as a GradedElement."""
    el = gens.zero()
    for key, coeff in poly.items():
        term = gens.scalar(coeff)
        for sym, exp in key:
            if not gens.is_even(sym):
                raise _ParseError(Diagnostic(
                    "error", symspans.get(sym, span),
                    f"unknown coordinate {sym!r}", "E012"))
            for _ in range(exp):
                term = term * gens.var(sym)
        el = el + term
    return el


def parse(text: str) -> ParseResult:
    """Parse a document; never raises.  Errors abort with diagnostics."""
    tokens, diags = _lex(text)
    if diags:
        return ParseResult(None, diags)
    parser = _Parser(tokens)
    items = []
    try:
        while parser.peek().kind != "eof":
            tok = parser.peek()
            if tok.kind != "name":
                parser.error(f"expected an item, found {tok.text!r}")
            if tok.text == "algebroid":
                items.append(_parse_algebroid(parser))
            elif tok.text == "submersion":
                items.append(_parse_submersion(parser))
            elif tok.text == "cochain":
                items.append(_parse_cochain(parser))
            elif tok.text == "foliation":
                items.append(_parse_foliation(parser))
            else:
                parser.error(f"unknown item kind {tok.text!r}")
        return _elaborate(items)
    except _ParseError as exc:
        return ParseResult(None, [exc.diag])


def _parse_algebroid(p: _Parser):
    p.expect_keyword("algebroid")
    name = p.expect("name", "an algebroid name")
    p.expect("{")
    base = p.parse_decl_block("base")
    fiber = p.parse_decl_block("fiber")
    p.expect_keyword("anchor")
    p.expect("{")
    anchor_rows = []
    while p.peek().kind != "}":
        sec = p.expect("name", "a section name")
        p.expect("arrow", "'->'")
        poly, span, symspans = p.parse_expression()
        p.expect(";")
        anchor_rows.append((sec, poly, span, symspans))
    p.expect("}")
    p.expect_keyword("bracket")
    p.expect("{")
    bracket_rows = []
    while p.peek().kind != "}":
        open_span = p.peek().span
        names = p.parse_namelist()
        if len(names) != 2:
            raise _ParseError(Diagnostic(
                "error", open_span, "a bracket row takes exactly two sections", "E013"))
        p.expect("=")
        poly, span, symspans = p.parse_expression()
        p.expect(";")
        bracket_rows.append((names[0], names[1], poly, span, symspans))
    p.expect("}")
    p.expect("}")
    return ("algebroid", name, base, fiber, anchor_rows, bracket_rows)


def _parse_submersion(p: _Parser):
    p.expect_keyword("submersion")
    name = p.expect("name", "a submersion name")
    p.expect("{")
    p.expect_keyword("over")
    over = p.expect("name", "a base object name")
    p.expect(";")
    fiber = p.parse_decl_block("fiber")
    p.expect("}")
    return ("submersion", name, over, fiber)


def _parse_cochain(p: _Parser):
    p.expect_keyword("cochain")
    name = p.expect("name", "a cochain name")
    p.expect_keyword("on")
    on = p.expect("name", "an algebroid name")
    p.expect("{")
    p.expect_keyword("arity")
    arity = p.expect("int", "the arity")
    p.expect(";")
    p.expect_keyword("values")
    p.expect("{")
    value_rows = []
    while p.peek().kind != "}":
        open_span = p.peek().span
        names = p.parse_namelist()
        p.expect("=")
        poly, span, symspans = p.parse_expression()
        p.expect(";")
        value_rows.append((names, poly, span, symspans, open_span))
    p.expect("}")
    p.expect_keyword("symbol")
    p.expect("{")
    symbol_rows = []
    while p.peek().kind != "}":
        open_span = p.peek().span
        names = p.parse_namelist()
        p.expect("=")
        poly, span, symspans = p.parse_expression()
        p.expect(";")
        symbol_rows.append((names, poly, span, symspans, open_span))
    p.expect("}")
    p.expect("}")
    return ("cochain", name, on, int(arity.text), value_rows, symbol_rows)


def _parse_foliation(p: _Parser):
    p.expect_keyword("foliation")
    name = p.expect("name", "a foliation name")
    p.expect("{")
    ambient = p.parse_decl_block("ambient")
    p.expect_keyword("spanning")
    p.expect("{")
    rows = []
    while p.peek().kind != "}":
        poly, span, symspans = p.parse_expression()
        p.expect(";")
        rows.append((poly, span, symspans))
    p.expect("}")
    p.expect("}")
    return ("foliation", name, ambient, rows)


def _elaborate(items) -> ParseResult:
    doc = SpecDocument()
    names_seen: dict[str, Span] = {}
    for item in items:
        kind, name = item[0], item[1]
        if name.text in names_seen:
            return ParseResult(None, [Diagnostic(
                "error", name.span, f"duplicate name {name.text!r}", "E020")])
        names_seen[name.text] = name.span
    try:
        for item in items:
            if item[0] == "algebroid":
                _elab_algebroid(doc, item)
            elif item[0] == "foliation":
                _elab_foliation(doc, item)
        for item in items:
            if item[0] == "submersion":
                _elab_submersion(doc, item)
            elif item[0] == "cochain":
                _elab_cochain(doc, item)
        # rebuild declaration order
        doc.order = [(item[0], item[1].text) for item in items]
    except _ParseError as exc:
        return ParseResult(None, [exc.diag])
    return ParseResult(doc, [])


def _check_decls(decls, what: str, even: bool):
    seen = set()
    for nm, w, span in decls:
        if nm in seen:
            raise _ParseError(Diagnostic(
                "error", span, f"duplicate {what} name {nm!r}", "E021"))
        seen.add(nm)
        if even and w < 1:
            raise _ParseError(Diagnostic(
                "error", span, f"{what} {nm!r} needs weight >= 1", "E022"))


def _elab_algebroid(doc: SpecDocument, item):
    _, name, base, fiber, anchor_rows, bracket_rows = item
    _check_decls(base, "coordinate", even=True)
    _check_decls(fiber, "section", even=False)
    base_decl = [(nm, w) for nm, w, _ in base]
    fiber_decl = [(nm, w) for nm, w, _ in fiber]
    try:
        gens = presentation_generators(base_decl, fiber_decl)
    except ValueError as exc:
        raise _ParseError(Diagnostic("error", name.span, str(exc), "E023"))
    coord_names = {nm for nm, _, _ in base}
    section_names = {nm for nm, _, _ in fiber}
    anchor: dict[tuple[str, str], GradedElement] = {}
    seen_anchor = set()
    for sec, poly, span, symspans in anchor_rows:
        if sec.text not in section_names:
            raise _ParseError(Diagnostic(
                "error", sec.span, f"unknown section {sec.text!r}", "E024"))
        if sec.text in seen_anchor:
            raise _ParseError(Diagnostic(
                "error", sec.span, f"duplicate anchor row for {sec.text!r}", "E025"))
        seen_anchor.add(sec.text)
        if not poly:
            continue
        ddx = {f"d/d{c}" for c in coord_names}
        split = _split_special(poly, ddx, "d/d<coordinate> factor", span)
        for atom, coeff_poly in split.items():
            coord = _DDX.match(atom).group(1)
            el = _poly_to_element(coeff_poly, gens, symspans, span)
            if not el.is_zero():
                anchor[(coord, sec.text)] = el
                doc.spans[("anchor", name.text, sec.text)] = span
    structure: dict[tuple[str, str], dict] = {}
    seen_pairs: dict[tuple[str, str], dict] = {}
    for s1, s2, poly, span, symspans in bracket_rows:
        for s in (s1, s2):
            if s.text not in section_names:
                raise _ParseError(Diagnostic(
                    "error", s.span, f"unknown section {s.text!r}", "E024"))
        vec_poly = _split_special(poly, section_names, "section factor", span) if poly else {}
        vec = {}
        for sname, coeff_poly in vec_poly.items():
            el = _poly_to_element(coeff_poly, gens, symspans, span)
            if not el.is_zero():
                vec[gens.odd_index(sname)] = el
        pair = (s1.text, s2.text)
        if s1.text == s2.text:
            if vec:
                raise _ParseError(Diagnostic(
                    "error", span,
                    f"bracket of {s1.text!r} with itself must be zero", "E026"))
            continue
        if pair in seen_pairs:
            raise _ParseError(Diagnostic(
                "error", span, f"duplicate bracket pair [{s1.text},{s2.text}]", "E027"))
        rev = (s2.text, s1.text)
        if rev in seen_pairs:
            other = seen_pairs[rev]
            negated = {k: el.scale(-1) for k, el in vec.items()}
            if other != negated:
                raise _ParseError(Diagnostic(
                    "error", span,
                    f"bracket [{s1.text},{s2.text}] contradicts the reversed pair "
                    f"(not antisymmetric)", "E028"))
            seen_pairs[pair] = vec
            continue
        seen_pairs[pair] = vec
        if vec:
            structure[pair] = vec
            doc.spans[("bracket", name.text, s1.text, s2.text)] = span
            doc.spans[("bracket", name.text, s2.text, s1.text)] = span
    try:
        pres = AlgebroidPresentation(name.text, base_decl, fiber_decl,
                                     anchor=anchor, structure=structure)
    except ValueError as exc:
        raise _ParseError(Diagnostic("error", name.span, str(exc), "E029"))
    doc.algebroids[name.text] = pres
    doc.spans[("algebroid", name.text)] = name.span


def _elab_submersion(doc: SpecDocument, item):
    _, name, over, fiber = item
    _check_decls(fiber, "fiber coordinate", even=True)
    if over.text in doc.algebroids:
        base = doc.algebroids[over.text].base
    elif over.text in doc.foliations:
        base = doc.foliations[over.text].ambient
    else:
        raise _ParseError(Diagnostic(
            "error", over.span, f"unknown base object {over.text!r}", "E030"))
    try:
        spec = SubmersionSpec(base, [(nm, w) for nm, w, _ in fiber])
    except ValueError as exc:
        raise _ParseError(Diagnostic("error", name.span, str(exc), "E031"))
    doc.submersions[name.text] = spec
    doc.submersion_over[name.text] = over.text
    doc.spans[("submersion", name.text)] = name.span


def _elab_cochain(doc: SpecDocument, item):
    _, name, on, arity, value_rows, symbol_rows = item
    pres = doc.algebroids.get(on.text)
    if pres is None:
        raise _ParseError(Diagnostic(
            "error", on.span, f"unknown algebroid {on.text!r}", "E030"))
    gens = pres.generators
    if arity < 1:
        raise _ParseError(Diagnostic(
            "error", name.span, "arity must be at least 1", "E032"))
    section_names = set(gens.odd_names)
    values = {}
    for names, poly, span, symspans, open_span in value_rows:
        if len(names) != arity:
            raise _ParseError(Diagnostic(
                "error", open_span, f"values rows take {arity} sections", "E033"))
        for s in names:
            if s.text not in section_names:
                raise _ParseError(Diagnostic(
                    "error", s.span, f"unknown section {s.text!r}", "E024"))
        key = tuple(gens.odd_index(s.text) for s in names)
        split = _split_special(poly, section_names, "section factor", span) if poly else {}
        vec = {gens.odd_index(s): _poly_to_element(cp, gens, symspans, span)
               for s, cp in split.items()}
        values[key] = vec
    symbol = {}
    coord_names = {f"d/d{c}" for c in gens.even_names}
    for names, poly, span, symspans, open_span in symbol_rows:
        if len(names) != arity - 1:
            raise _ParseError(Diagnostic(
                "error", open_span, f"symbol rows take {arity - 1} sections", "E033"))
        for s in names:
            if s.text not in section_names:
                raise _ParseError(Diagnostic(
                    "error", s.span, f"unknown section {s.text!r}", "E024"))
        key = tuple(gens.odd_index(s.text) for s in names)
        split = _split_special(poly, coord_names, "d/d<coordinate> factor", span) if poly else {}
        vec = {gens.even_index(_DDX.match(a).group(1)):
               _poly_to_element(cp, gens, symspans, span) for a, cp in split.items()}
        symbol[key] = vec
    try:
        c = Multiderivation(pres, arity, values=values, symbol=symbol)
    except ValueError as exc:
        raise _ParseError(Diagnostic("error", name.span, str(exc), "E034"))
    doc.cochains[name.text] = c
    doc.cochain_on[name.text] = on.text
    doc.spans[("cochain", name.text)] = name.span


def _elab_foliation(doc: SpecDocument, item):
    _, name, ambient, rows = item
    _check_decls(ambient, "coordinate", even=True)
    amb = [(nm, w) for nm, w, _ in ambient]
    coords = [nm for nm, _, _ in ambient]
    ddx = {f"d/d{c}" for c in coords}
    spanning = []
    for poly, span, symspans in rows:
        split = _split_special(poly, ddx, "d/d<coordinate> factor", span) if poly else {}
        vec = [Fraction(0)] * len(coords)
        for atom, coeff_poly in split.items():
            coord = _DDX.match(atom).group(1)
            const = Fraction(0)
            for key, c in coeff_poly.items():
                if key:
                    raise _ParseError(Diagnostic(
                        "error", span, "spanning fields must have constant coefficients",
                        "E035"))
                const = c
            vec[coords.index(coord)] = const
        spanning.append(vec)
    try:
        spec = FoliationSpec(amb, spanning)
    except ValueError as exc:
        raise _ParseError(Diagnostic("error", name.span, str(exc), "E036"))
    doc.foliations[name.text] = spec
    doc.spans[("foliation", name.text)] = name.span


# -- emitter -------------------------------------------------------------------

def _format_poly_times(el: GradedElement, atom: str) -> str:
    """Render poly * atom with canonical term order; parenthesise sums."""
    text = format_element(el)
    if text == "1":
        return atom
    if text == "-1":
        return f"-{atom}"
    if " " in text:
        return f"({text})*{atom}"
    return f"{text}*{atom}"


def _join_terms(parts: list[str]) -> str:
    out = ""
    for i, part in enumerate(parts):
        if i == 0:
            out = part
        elif part.startswith("-"):
            out += " - " + part[1:]
        else:
            out += " + " + part
    return out or "0"


def emit_algebroid(pres: AlgebroidPresentation) -> str:
    gens = pres.generators
    base = ", ".join(f"{n}:{w}" for n, w in pres.base)
    fiber = ", ".join(f"{n}:{w}" for n, w in pres.frame)
    lines = [f"algebroid {pres.name} {{"]
    lines.append(f"  base {{{' ' + base + ' ' if base else ''}}}")
    lines.append(f"  fiber {{{' ' + fiber + ' ' if fiber else ''}}}")
    anchor_rows = []
    for i, sec in enumerate(gens.odd_names):
        parts = []
        for a, coord in enumerate(gens.even_names):
            el = pres.anchor.get((a, i))
            if el is not None and not el.is_zero():
                parts.append(_format_poly_times(el, f"d/d{coord}"))
        if parts:
            anchor_rows.append(f"    {sec} -> {_join_terms(parts)};")
    if anchor_rows:
        lines.append("  anchor {")
        lines.extend(anchor_rows)
        lines.append("  }")
    else:
        lines.append("  anchor {}")
    bracket_rows = []
    for (i, j), vec in sorted(pres.structure.items()):
        parts = []
        for k in sorted(vec):
            el = vec[k]
            if not el.is_zero():
                parts.append(_format_poly_times(el, gens.odd_names[k]))
        if parts:
            bracket_rows.append(
                f"    [{gens.odd_names[i]},{gens.odd_names[j]}] = {_join_terms(parts)};")
    if bracket_rows:
        lines.append("  bracket {")
        lines.extend(bracket_rows)
        lines.append("  }")
    else:
        lines.append("  bracket {}")
    lines.append("}")
    return "\n".join(lines)


def emit(doc: SpecDocument) -> str:
    """Canonical text for a document; `parse(emit(doc))` reproduces it."""
    chunks = []
    for kind, name in doc.order:
        if kind == "algebroid":
            chunks.append(emit_algebroid(doc.algebroids[name]))
        elif kind == "submersion":
            spec = doc.submersions[name]
            fiber = ", ".join(f"{n}:{w}" for n, w in spec.fibers)
            chunks.append(
                f"submersion {name} {{\n  over {doc.submersion_over[name]};\n"
                f"  fiber {{ {fiber} }}\n}}")
        elif kind == "cochain":
            chunks.append(_emit_cochain(doc, name))
        elif kind == "foliation":
            spec = doc.foliations[name]
            amb = ", ".join(f"{n}:{w}" for n, w in spec.ambient)
            rows = []
            for row in spec.spanning:
                parts = []
                for a, c in enumerate(row):
                    if c:
                        coord = spec.ambient[a][0]
                        if c == 1:
                            parts.append(f"d/d{coord}")
                        elif c == -1:
                            parts.append(f"-d/d{coord}")
                        else:
                            parts.append(f"{c}*d/d{coord}")
                rows.append(f"    {_join_terms(parts)};")
            body = "\n".join(rows)
            spanning = f"  spanning {{\n{body}\n  }}" if rows else "  spanning {}"
            chunks.append(f"foliation {name} {{\n  ambient {{ {amb} }}\n{spanning}\n}}")
    return "\n\n".join(chunks) + ("\n" if chunks else "")


def _emit_cochain(doc: SpecDocument, name: str) -> str:
    c = doc.cochains[name]
    gens = c.pres.generators
    lines = [f"cochain {name} on {doc.cochain_on[name]} {{", f"  arity {c.arity};"]
    value_rows = []
    for key in sorted(c.values):
        vec = c.values[key]
        parts = [_format_poly_times(vec[k], gens.odd_names[k]) for k in sorted(vec)]
        if parts:
            sections = ",".join(gens.odd_names[i] for i in key)
            value_rows.append(f"    [{sections}] = {_join_terms(parts)};")
    if value_rows:
        lines.append("  values {")
        lines.extend(value_rows)
        lines.append("  }")
    else:
        lines.append("  values {}")
    symbol_rows = []
    for key in sorted(c.symbol):
        vec = c.symbol[key]
        parts = [_format_poly_times(vec[a], f"d/d{gens.even_names[a]}")
                 for a in sorted(vec)]
        if parts:
            sections = ",".join(gens.odd_names[i] for i in key)
            symbol_rows.append(f"    [{sections}] = {_join_terms(parts)};")
    if symbol_rows:
        lines.append("  symbol {")
        lines.extend(symbol_rows)
        lines.append("  }")
    else:
        lines.append("  symbol {}")
    lines.append("}")
    return "\n".join(lines)
