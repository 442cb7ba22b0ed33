"""Constant-coefficient foliations, their Bott complexes, and flag checks.

A foliation is spanned by constant, linearly independent vector fields on a
weighted affine space; involutivity is automatic and the tangent algebroid
has the inclusion anchor with a zero bracket.  Deformations of the foliation
live in the complex of leafwise forms valued in the normal bundle; with a
constant complementary frame the Bott connection coefficients vanish, so the
differential is just the leafwise derivative of the coefficients.  Each
normal direction d/dx^b contributes weight -w(x^b), which lines the Bott
blocks up with the deformation-complex blocks for direct Betti comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .algebroid import AlgebroidPresentation, foliation_preset
from .cohomology import CohomologyReport, betti, morita_check
from .complexes import DeformationComplex
from .graded import (
    ORIGIN_LEAFWISE,
    GeneratorSet,
    GradedDerivation,
    GradedElement,
    GradedMonomial,
    rational,
)
from .linalg import SparseRationalMatrix, rref
from .pullback import SubmersionSpec, pullback_algebroid, vertical_section_name


@dataclass(frozen=True)
class FoliationSpec:
    """Constant spanning fields on a weighted affine space."""
    ambient: tuple[tuple[str, int], ...]
    spanning: tuple[tuple[Fraction, ...], ...]

    def __init__(self, ambient: Iterable[tuple[str, int]],
                 spanning: Iterable[Sequence] = ()):
        amb = tuple((str(n), int(w)) for n, w in ambient)
        rows = tuple(tuple(rational(c) for c in row) for row in spanning)
        object.__setattr__(self, "ambient", amb)
        object.__setattr__(self, "spanning", rows)
        for row in rows:
            if len(row) != len(amb):
                raise ValueError("spanning vector length must match the ambient dimension")
        if rows and _rank_rows([list(r) for r in rows]) != len(rows):
            raise ValueError("spanning vectors are linearly dependent")

    @property
    def rank(self) -> int:
        return len(self.spanning)


def _rank_rows(rows: list[list[Fraction]]) -> int:
    if not rows:
        return 0
    _, pivots = rref(rows)
    return len(pivots)


def foliation_algebroid(F: FoliationSpec, name: str = "TF") -> AlgebroidPresentation:
    return foliation_preset(name, F.ambient, [list(r) for r in F.spanning])


def normal_frame_indices(F: FoliationSpec) -> list[int]:
    """Coordinates whose fields complete the spanning set: the non-pivot
    columns of the row-reduced spanning matrix."""
    n = len(F.ambient)
    if not F.spanning:
        return list(range(n))
    _, pivots = rref([list(r) for r in F.spanning])
    pivot_set = set(pivots)
    return [i for i in range(n) if i not in pivot_set]


class BottComplex:
    """Leafwise forms with values in a constant normal frame.

    Block keys are (monomial in ambient coordinates and leafwise duals,
    normal coordinate index); the differential applies the leafwise
    derivative to the coefficient and leaves the normal leg alone.
    """

    def __init__(self, F: FoliationSpec, label: str = "Bott"):
        self.spec = F
        self.label = label
        self.normal = normal_frame_indices(F)
        leaf_duals = []
        for s, row in enumerate(F.spanning):
            touched = {F.ambient[a][1] for a, c in enumerate(row) if c != 0}
            w = touched.pop() if len(touched) == 1 else 1
            leaf_duals.append((f"th{s+1}", w, ORIGIN_LEAFWISE))
        self.gens = GeneratorSet(F.ambient, leaf_duals)
        images = {}
        for a, (coord, _) in enumerate(F.ambient):
            img = self.gens.zero()
            for s, row in enumerate(F.spanning):
                if row[a]:
                    img = img + self.gens.var(f"th{s+1}").scale(row[a])
            if not img.is_zero():
                images[coord] = img
        self.differential = GradedDerivation(self.gens, 1, images)
        self._keys: dict[tuple[int, int], tuple] = {}
        self._matrices: dict[tuple[int, int], SparseRationalMatrix] = {}

    def normal_weight(self, b: int) -> int:
        return -self.spec.ambient[b][1]

    def block_keys(self, degree: int, weight: int):
        cached = self._keys.get((degree, weight))
        if cached is not None:
            return cached
        keys = []
        for b in self.normal:
            for mono in self.gens.basis(degree, weight - self.normal_weight(b)):
                keys.append((mono, b))
        result = tuple(keys)
        self._keys[(degree, weight)] = result
        return result

    def block_dim(self, degree: int, weight: int) -> int:
        return len(self.block_keys(degree, weight))

    def matrix(self, degree: int, weight: int) -> SparseRationalMatrix:
        cached = self._matrices.get((degree, weight))
        if cached is not None:
            return cached
        src = self.block_keys(degree, weight)
        dst = self.block_keys(degree + 1, weight)
        index = {k: i for i, k in enumerate(dst)}
        entries = {}
        for col, (mono, b) in enumerate(src):
            img = self.differential.apply(GradedElement(self.gens, {mono: Fraction(1)}))
            for m, c in img.terms.items():
                entries[(index[(m, b)], col)] = c
        mat = SparseRationalMatrix(len(dst), len(src), entries)
        self._matrices[(degree, weight)] = mat
        return mat


def bott_complex(F: FoliationSpec) -> BottComplex:
    return BottComplex(F)


@dataclass
class ComparisonBlock:
    degree: int
    weight: int
    bott: int
    deformation: int

    @property
    def equal(self) -> bool:
        return self.bott == self.deformation


@dataclass
class ComparisonReport:
    blocks: list[ComparisonBlock] = field(default_factory=list)
    findings: list[str] = field(default_factory=list)

    @property
    def all_equal(self) -> bool:
        return all(b.equal for b in self.blocks)


def def_vs_bott(F: FoliationSpec, degrees: Sequence[int],
                weights: Sequence[int]) -> ComparisonReport:
    """Betti tables of the Bott complex against the deformation complex.

    Compared in degrees >= 0 only; the deformation side has a degree -1
    component with no Bott counterpart.  Mismatches are reported as findings,
    never patched.
    """
    degrees = [n for n in degrees if n >= 0]
    bc = bott_complex(F)
    tf = foliation_algebroid(F)
    dc = DeformationComplex(tf.de_rham())
    bott_b = betti(bc, degrees, weights)
    def_b = betti(dc, degrees, weights)
    report = ComparisonReport()
    for w in weights:
        for n in degrees:
            block = ComparisonBlock(degree=n, weight=w,
                                    bott=bott_b.betti(n, w),
                                    deformation=def_b.betti(n, w))
            report.blocks.append(block)
            if not block.equal:
                report.findings.append(
                    f"Betti mismatch at degree {n}, weight {w}: "
                    f"Bott {block.bott} vs deformation {block.deformation}")
    return report


@dataclass
class FlagReport:
    tables_isomorphic: bool
    table_differences: list[str]
    morita: object

    @property
    def passed(self) -> bool:
        return self.tables_isomorphic and self.morita.passed


def flag_check(V_spec: SubmersionSpec, H_spanning: Sequence[Sequence],
               m: int, weights: Sequence[int]) -> FlagReport:
    """Check a flag of foliations V inside H on the total space of V_spec.

    (a) The foliation algebroid of H (in its canonical frame: verticals
    first, then horizontal lifts) must equal, table for table, the pull-back
    of the projected foliation on the base.  (b) The projected foliation and
    H must share deformation cohomology up to degree m, via `morita_check`.
    """
    base = list(V_spec.base)
    fibers = list(V_spec.fibers)
    n_base = len(base)
    n = n_base + len(fibers)
    rows = [[rational(c) for c in row] for row in H_spanning]
    for row in rows:
        if len(row) != n:
            raise ValueError("H spanning vectors must live on the total space")
    # verticals are the fiber coordinate fields; they must lie in span(H)
    span_rows = [list(r) for r in rows]
    for j in range(len(fibers)):
        vert = [Fraction(0)] * n
        vert[n_base + j] = Fraction(1)
        if _rank_rows(span_rows + [vert]) != _rank_rows(span_rows):
            raise ValueError("the vertical foliation is not contained in H")
    # canonical frame: project spanning fields to the base, keep a maximal
    # independent subset (the verticals absorb the fiber components)
    base_rows = [list(r[:n_base]) for r in rows]
    chosen: list[list[Fraction]] = []
    for r in base_rows:
        if any(r) and _rank_rows(chosen + [r]) > _rank_rows(chosen):
            chosen.append(r)
    F = FoliationSpec(base, chosen)
    if F.rank + len(fibers) != _rank_rows([list(r) for r in rows]):
        raise ValueError("H does not split as verticals plus lifted fields")
    TF = foliation_algebroid(F, name="TF")
    ppres = pullback_algebroid(TF, V_spec)
    # canonical frame for H: vertical fields then lifted spanning fields
    h_rows = []
    for j in range(len(fibers)):
        vert = [Fraction(0)] * n
        vert[n_base + j] = Fraction(1)
        h_rows.append(vert)
    for r in chosen:
        h_rows.append(list(r) + [Fraction(0)] * len(fibers))
    ambient = base + fibers
    names = [vertical_section_name(u) for u, _ in fibers] + [f"F{i+1}" for i in range(F.rank)]
    TH = foliation_preset("TH", ambient, h_rows, section_names=names)
    differences = _presentation_table_diff(TH, ppres.presentation)
    morita = morita_check(TF, V_spec, "def", m, list(weights))
    return FlagReport(tables_isomorphic=not differences,
                      table_differences=differences, morita=morita)


def _presentation_table_diff(a: AlgebroidPresentation,
                             b: AlgebroidPresentation) -> list[str]:
    """Table-level comparison after the canonical frame choice (names aside)."""
    diffs = []
    if a.base != b.base:
        diffs.append(f"base mismatch: {a.base} vs {b.base}")
    wa = [w for _, w in a.frame]
    wb = [w for _, w in b.frame]
    if wa != wb:
        diffs.append(f"frame weight mismatch: {wa} vs {wb}")
    if diffs:
        return diffs
    def raw(el):
        # entries are even polynomials; compare exponent vectors directly
        return {(m.evens, m.mask): c for m, c in el.terms.items()}

    for x in range(a.dim):
        for i in range(a.rank):
            if raw(a.anchor_entry(x, i)) != raw(b.anchor_entry(x, i)):
                diffs.append(f"anchor entry ({x},{i}) differs")
    for i in range(a.rank):
        for j in range(i + 1, a.rank):
            va = a.structure_vector(i, j)
            vb = b.structure_vector(i, j)
            for k in set(va) | set(vb):
                ea = va.get(k, a.generators.zero())
                eb = vb.get(k, b.generators.zero())
                if raw(ea) != raw(eb):
                    diffs.append(f"bracket entry ({i},{j})->{k} differs")
    return diffs
