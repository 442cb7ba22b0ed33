"""Lie algebroid presentations over weighted coordinate bases.

A presentation is a trivialized algebroid: base coordinates x^a (even, with
positive weights), a frame of sections e_i (whose odd duals carry assigned
weights), an anchor matrix of polynomials rho^a_i, and an antisymmetric
structure table c^k_ij of polynomials.  The associated de Rham complex is the
graded algebra on (x^a; xi^i) with

    d x^a = sum_i rho^a_i xi^i,
    d xi^k = -1/2 sum_{i,j} c^k_ij xi^i xi^j,

a weight-preserving degree +1 derivation.  The sign convention is fixed so
that d^2 = 0 is equivalent to the anchor-morphism property plus the Jacobi
identity, which is what `validate` checks (on generators; the Leibniz rule
makes that sufficient).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .graded import (
    ORIGIN_FIBER,
    GeneratorSet,
    GradedDerivation,
    GradedElement,
    derivation_commutator,
    rational,
)

# Sections and tangent vectors with polynomial coefficients, indexed by
# frame/base position.  Plain dicts keep the calculus lightweight.
SectionVector = dict[int, GradedElement]
TangentVector = dict[int, GradedElement]


class WeightHomogeneityError(ValueError):
    """An anchor or structure entry fails weight homogeneity.

    `kind` is "anchor" or "bracket", `key` names the offending entry.
    """

    def __init__(self, kind: str, key: tuple[str, ...], expected: int, message: str):
        super().__init__(message)
        self.kind = kind
        self.key = key
        self.expected = expected


def presentation_generators(base: Sequence[tuple[str, int]],
                            frame: Sequence[tuple[str, int]],
                            frame_origins: Sequence[str] | None = None) -> GeneratorSet:
    """Generator set of the de Rham algebra: base evens plus frame duals."""
    if frame_origins is None:
        frame_origins = [ORIGIN_FIBER] * len(frame)
    return GeneratorSet(base, [(n, w, o) for (n, w), o in zip(frame, frame_origins)])


class AlgebroidPresentation:
    """A trivialized Lie algebroid: base, frame, anchor and bracket tables.

    Anchor entries are even polynomials over the presentation's own generator
    set; the structure table is stored on ordered pairs i < j and read off
    antisymmetrically.  Construction checks shapes and antisymmetry input;
    weight homogeneity is checked by `weight_violations` / `build_differential`.
    """

    def __init__(self, name: str,
                 base: Sequence[tuple[str, int]],
                 frame: Sequence[tuple[str, int]],
                 anchor: Mapping[tuple[str, str], GradedElement] | None = None,
                 structure: Mapping[tuple[str, str], SectionVector] | None = None,
                 frame_origins: Sequence[str] | None = None):
        self.name = str(name)
        self.base = tuple((str(n), int(w)) for n, w in base)
        self.frame = tuple((str(n), int(w)) for n, w in frame)
        self.generators = presentation_generators(self.base, self.frame, frame_origins)
        gens = self.generators
        self.anchor: dict[tuple[int, int], GradedElement] = {}
        for (coord, sec), el in (anchor or {}).items():
            if el.is_zero():
                continue
            a = gens.even_index(coord)
            i = gens.odd_index(sec)
            if el.gens != gens:
                raise ValueError(f"anchor entry ({coord}, {sec}) over a foreign generator set")
            if el.cochain_degree() not in (None, 0):
                raise ValueError(f"anchor entry ({coord}, {sec}) must be an even polynomial")
            self.anchor[(a, i)] = el
        self.structure: dict[tuple[int, int], SectionVector] = {}
        for (si, sj), vec in (structure or {}).items():
            i = gens.odd_index(si)
            j = gens.odd_index(sj)
            if i == j:
                if any(not el.is_zero() for el in vec.values()):
                    raise ValueError(f"bracket [{si},{si}] must vanish")
                continue
            sign = 1
            if i > j:
                i, j, sign = j, i, -1
            entry = self.structure.setdefault((i, j), {})
            for k, el in vec.items():
                k = k if isinstance(k, int) else gens.odd_index(k)
                cur = entry.get(k, gens.zero()) + el.scale(sign)
                if cur.is_zero():
                    entry.pop(k, None)
                else:
                    entry[k] = cur
            if not entry:
                del self.structure[(i, j)]
        self._de_rham: DeRhamComplex | None = None

    # -- accessors ----------------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.frame)

    @property
    def dim(self) -> int:
        return len(self.base)

    def anchor_entry(self, a: int, i: int) -> GradedElement:
        el = self.anchor.get((a, i))
        return el if el is not None else self.generators.zero()

    def structure_vector(self, i: int, j: int) -> SectionVector:
        """The bracket [e_i, e_j] as a section vector (antisymmetric lookup)."""
        if i == j:
            return {}
        sign = 1
        if i > j:
            i, j, sign = j, i, -1
        vec = self.structure.get((i, j), {})
        return {k: el.scale(sign) for k, el in vec.items()} if sign < 0 else dict(vec)

    def structure_entry(self, k: int, i: int, j: int) -> GradedElement:
        return self.structure_vector(i, j).get(k, self.generators.zero())

    def frame_section(self, i: int) -> SectionVector:
        return {i: self.generators.scalar(1)}

    # -- weight bookkeeping ---------------------------------------------------

    def weight_violations(self) -> list[tuple[str, tuple[str, ...], int, GradedElement]]:
        """Entries breaking weight(rho^a_i) = w(x^a) - w(xi^i) or
        weight(c^k_ij) = w(xi^k) - w(xi^i) - w(xi^j)."""
        gens = self.generators
        bad = []
        for (a, i), el in self.anchor.items():
            expected = gens.even_weights[a] - gens.odd_weights[i]
            if el.weight_split().keys() - {expected}:
                bad.append(("anchor", (gens.even_names[a], gens.odd_names[i]), expected, el))
        for (i, j), vec in self.structure.items():
            for k, el in vec.items():
                expected = gens.odd_weights[k] - gens.odd_weights[i] - gens.odd_weights[j]
                if el.weight_split().keys() - {expected}:
                    bad.append(("bracket",
                                (gens.odd_names[k], gens.odd_names[i], gens.odd_names[j]),
                                expected, el))
        return bad

    def de_rham(self) -> "DeRhamComplex":
        if self._de_rham is None:
            self._de_rham = build_differential(self)
        return self._de_rham

    def __repr__(self):
        return (f"<AlgebroidPresentation {self.name!r} base={list(self.generators.even_names)} "
                f"frame={list(self.generators.odd_names)}>")


@dataclass
class DeRhamComplex:
    """The graded algebra of a presentation with its degree +1 differential."""
    generators: GeneratorSet
    differential: GradedDerivation
    presentation: AlgebroidPresentation


@dataclass
class ValidationReport:
    passed: bool
    failures: list[tuple[str, GradedElement]] = field(default_factory=list)


def build_differential(pres: AlgebroidPresentation) -> DeRhamComplex:
    """Assemble the de Rham complex; raises on weight-inhomogeneous entries."""
    bad = pres.weight_violations()
    if bad:
        kind, key, expected, _ = bad[0]
        raise WeightHomogeneityError(
            kind, key, expected,
            f"{kind} entry {key} of {pres.name!r} is not weight homogeneous "
            f"of weight {expected}")
    gens = pres.generators
    images: dict[str, GradedElement] = {}
    for a, coord in enumerate(gens.even_names):
        img = gens.zero()
        for i, sec in enumerate(gens.odd_names):
            el = pres.anchor.get((a, i))
            if el is not None:
                img = img + el * gens.var(sec)
        if not img.is_zero():
            images[coord] = img
    for k, dual in enumerate(gens.odd_names):
        img = gens.zero()
        for (i, j), vec in pres.structure.items():
            el = vec.get(k)
            if el is not None:
                img = img - el * gens.var(gens.odd_names[i]) * gens.var(gens.odd_names[j])
        if not img.is_zero():
            images[dual] = img
    return DeRhamComplex(gens, GradedDerivation(gens, 1, images), pres)


def validate(pres: AlgebroidPresentation) -> ValidationReport:
    """Check [d, d] = 0 on every generator (sufficient by the Leibniz rule)."""
    d = pres.de_rham().differential
    square = derivation_commutator(d, d)
    failures = [(name, el) for name, el in square.images.items() if not el.is_zero()]
    return ValidationReport(passed=not failures, failures=failures)


# -- section calculus ---------------------------------------------------------
# Sections X = sum_i f^i e_i and tangent vectors T = sum_a g^a d/dx^a with
# polynomial coefficients; enough calculus to express brackets of sections,
# which the deformation module needs.

def vec_add(u: SectionVector, v: SectionVector) -> SectionVector:
    out = dict(u)
    for k, el in v.items():
        cur = out.get(k)
        cur = el if cur is None else cur + el
        if cur.is_zero():
            out.pop(k, None)
        else:
            out[k] = cur
    return out


def vec_scale(u: SectionVector, f) -> SectionVector:
    out = {}
    for k, el in u.items():
        s = el * f if isinstance(f, GradedElement) else el.scale(f)
        if not s.is_zero():
            out[k] = s
    return out


def vec_is_zero(u: SectionVector) -> bool:
    return all(el.is_zero() for el in u.values())


def vec_eq(u: SectionVector, v: SectionVector) -> bool:
    keys = set(u) | set(v)
    zero = None
    for k in keys:
        a = u.get(k)
        b = v.get(k)
        if a is None:
            a = b.gens.zero()
        if b is None:
            b = a.gens.zero()
        if a != b:
            return False
    return True


def anchor_field(pres: AlgebroidPresentation, X: SectionVector) -> TangentVector:
    """rho(X) as a tangent vector on the base."""
    out: TangentVector = {}
    for i, f in X.items():
        for (a, ii), el in pres.anchor.items():
            if ii != i:
                continue
            cur = out.get(a, pres.generators.zero()) + el * f
            if cur.is_zero():
                out.pop(a, None)
            else:
                out[a] = cur
    return out


def tangent_apply(pres: AlgebroidPresentation, T: TangentVector,
                  f: GradedElement) -> GradedElement:
    """T(f) = sum_a T^a df/dx^a."""
    gens = pres.generators
    out = gens.zero()
    for a, g in T.items():
        out = out + g * f.diff_even(gens.even_names[a])
    return out


def tangent_commutator(pres: AlgebroidPresentation, S: TangentVector,
                       T: TangentVector) -> TangentVector:
    """Commutator of vector fields: [S,T]^a = S(T^a) - T(S^a)."""
    out: TangentVector = {}
    keys = set(S) | set(T)
    zero = pres.generators.zero()
    for a in keys:
        el = tangent_apply(pres, S, T.get(a, zero)) - tangent_apply(pres, T, S.get(a, zero))
        if not el.is_zero():
            out[a] = el
    return out


def section_bracket(pres: AlgebroidPresentation, X: SectionVector,
                    Y: SectionVector) -> SectionVector:
    """[X, Y] extended by the Leibniz rule through the anchor."""
    gens = pres.generators
    out: SectionVector = {}
    rho_X = anchor_field(pres, X)
    rho_Y = anchor_field(pres, Y)
    for i, f in X.items():
        for j, g in Y.items():
            for k, el in pres.structure_vector(i, j).items():
                cur = out.get(k, gens.zero()) + f * g * el
                if cur.is_zero():
                    out.pop(k, None)
                else:
                    out[k] = cur
    for j, g in Y.items():
        cur = out.get(j, gens.zero()) + tangent_apply(pres, rho_X, g)
        if cur.is_zero():
            out.pop(j, None)
        else:
            out[j] = cur
    for i, f in X.items():
        cur = out.get(i, gens.zero()) - tangent_apply(pres, rho_Y, f)
        if cur.is_zero():
            out.pop(i, None)
        else:
            out[i] = cur
    return out


# -- presets ------------------------------------------------------------------

_COORD_NAMES = ("x", "y", "z", "w")
_FRAME_NAMES = ("X", "Y", "Z", "W")


def tangent_preset(n: int, name: str | None = None) -> AlgebroidPresentation:
    """Tangent algebroid of weighted affine n-space: identity anchor, zero bracket."""
    if n < 1:
        raise ValueError("tangent preset needs n >= 1")
    coords = list(_COORD_NAMES[:n]) if n <= 4 else [f"x{i+1}" for i in range(n)]
    fields = list(_FRAME_NAMES[:n]) if n <= 4 else [f"X{i+1}" for i in range(n)]
    base = [(c, 1) for c in coords]
    frame = [(f, 1) for f in fields]
    pres = AlgebroidPresentation(name or f"T{n}", base, frame)
    gens = pres.generators
    for i in range(n):
        pres.anchor[(i, i)] = gens.scalar(1)
    return pres


def lie_algebra_preset(name: str, sections: Sequence[str],
                       brackets: Mapping[tuple[str, str], Mapping[str, object]],
                       weights: Sequence[int] | None = None) -> AlgebroidPresentation:
    """Lie algebra over a point from constant structure constants."""
    secs = list(sections)
    if weights is None:
        weights = [0] * len(secs)
    frame = [(s, w) for s, w in zip(secs, weights)]
    gens = presentation_generators([], frame)
    structure: dict[tuple[str, str], SectionVector] = {}
    for (si, sj), vec in brackets.items():
        structure[(si, sj)] = {gens.odd_index(k): gens.scalar(c) for k, c in vec.items()}
    return AlgebroidPresentation(name, [], frame, structure=structure)


def action_preset(name: str, base: Sequence[tuple[str, int]],
                  sections: Sequence[tuple[str, int]],
                  brackets: Mapping[tuple[str, str], Mapping[str, object]],
                  fields: Mapping[str, Mapping[str, GradedElement]]) -> AlgebroidPresentation:
    """Action algebroid M x g: constant brackets, anchor given by vector fields.

    `fields` maps each section name to {coordinate: polynomial coefficient};
    the polynomials must live over the presentation's generator set, so build
    them with `presentation_generators(base, sections)` first.
    """
    gens = presentation_generators(base, sections)
    structure: dict[tuple[str, str], SectionVector] = {}
    for (si, sj), vec in brackets.items():
        structure[(si, sj)] = {gens.odd_index(k): gens.scalar(c) for k, c in vec.items()}
    anchor: dict[tuple[str, str], GradedElement] = {}
    for sec, comps in fields.items():
        for coord, el in comps.items():
            anchor[(coord, sec)] = el
    return AlgebroidPresentation(name, base, sections, anchor=anchor, structure=structure)


def foliation_preset(name: str, ambient: Sequence[tuple[str, int]],
                     spanning: Sequence[Sequence[object]],
                     section_names: Sequence[str] | None = None) -> AlgebroidPresentation:
    """Foliation algebroid: constant spanning fields, inclusion anchor, zero bracket."""
    n = len(ambient)
    rows = [[rational(c) for c in vec] for vec in spanning]
    for row in rows:
        if len(row) != n:
            raise ValueError("spanning vector length must match the ambient dimension")
    if _constant_rank(rows) != len(rows):
        raise ValueError("spanning vectors are linearly dependent")
    if section_names is None:
        section_names = [f"F{i+1}" for i in range(len(rows))]
    weights = set(w for _, w in ambient)
    # constant anchor entries force equal weights along each field's support
    frame = []
    for nm, row in zip(section_names, rows):
        touched = {ambient[a][1] for a, c in enumerate(row) if c != 0}
        if len(touched) > 1:
            raise ValueError(f"spanning field {nm!r} mixes coordinates of different weights")
        frame.append((nm, touched.pop() if touched else min(weights or {1})))
    gens = presentation_generators(ambient, frame)
    anchor = {}
    for i, row in enumerate(rows):
        for a, c in enumerate(row):
            if c != 0:
                anchor[(ambient[a][0], frame[i][0])] = gens.scalar(c)
    return AlgebroidPresentation(name, ambient, frame, anchor=anchor)


def _constant_rank(rows: list[list[Fraction]]) -> int:
    m = [list(r) for r in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        piv = None
        for r in range(rank, len(m)):
            if m[r][c] != 0:
                piv = r
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pv = m[rank][c]
        for r in range(len(m)):
            if r != rank and m[r][c] != 0:
                f = m[r][c] / pv
                m[r] = [x - f * y for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank


def standard_preset(kind: str, **params) -> AlgebroidPresentation:
    """Dispatch to the named preset family."""
    if kind == "tangent":
        return tangent_preset(**params)
    if kind == "lie_algebra":
        return lie_algebra_preset(**params)
    if kind == "action":
        return action_preset(**params)
    if kind == "foliation":
        return foliation_preset(**params)
    raise ValueError(f"unknown preset kind {kind!r}")
